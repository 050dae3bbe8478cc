// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/omega_net.hpp"

#include <stdexcept>
#include <string>

namespace omega {

namespace {

std::string stage(const char* path, int j) { return std::string(path) + "." + std::to_string(j); }

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("model config: " + msg); };
  if (depth < 2) fail("depth must be >= 2");
  if (static_cast<int>(encoder_channels.size()) != depth) {
    fail("encoder_channels must list exactly depth = " + std::to_string(depth) + " entries");
  }
  if (static_cast<int>(decoder_channels.size()) != depth) {
    fail("decoder_channels must list exactly depth = " + std::to_string(depth) + " entries");
  }
  if (encoder_channels[0] < 1) fail("encoder_channels[0] must be >= 1");
  for (int i = 1; i < depth; ++i) {
    if (encoder_channels[i] != 2 * encoder_channels[i - 1]) {
      fail("encoder_channels[" + std::to_string(i) + "] must double the previous entry");
    }
  }
  for (int i = 0; i < depth; ++i) {
    if (decoder_channels[i] != encoder_channels[depth - 1 - i]) {
      fail("decoder_channels must be the reverse of encoder_channels (entry " +
           std::to_string(i) + ")");
    }
  }
  if (out_channels < 1) fail("out_channels must be >= 1");
  if (k < 1) fail("k must be >= 1");
  if (lambda_s < 0 || lambda_a < 0) fail("lambda weights must be non-negative");
  if (input_size < 1 || (input_size & (input_size - 1)) != 0) fail("input_size must be a power of two");
  if ((input_size >> (depth - 1)) < 1) {
    fail("input_size " + std::to_string(input_size) + " is too small for depth " +
         std::to_string(depth));
  }
  if (use_mdsa) {
    const std::int64_t coarsest = input_size >> (depth - 2);
    if (coarsest * coarsest < k) {
      fail("k = " + std::to_string(k) + " exceeds the pixel count of the coarsest attention stage (" +
           std::to_string(coarsest * coarsest) + ")");
    }
  }
}

ModelConfig ModelConfig::toy(int depth, std::int64_t base_channels, std::int64_t input_size,
                             std::int64_t k) {
  ModelConfig cfg;
  cfg.depth = depth;
  cfg.encoder_channels.clear();
  for (int i = 0; i < depth; ++i) cfg.encoder_channels.push_back(base_channels << i);
  cfg.decoder_channels.assign(cfg.encoder_channels.rbegin(), cfg.encoder_channels.rend());
  cfg.input_size = input_size;
  cfg.k = k;
  return cfg;
}

std::vector<blocks::ParamSpec> parameter_layout(const ModelConfig& cfg) {
  cfg.validate();
  std::vector<blocks::ParamSpec> specs;
  const int d = cfg.depth;
  const auto& enc = cfg.encoder_channels;
  const auto& dec = cfg.decoder_channels;
  for (int i = 1; i <= d; ++i) {
    blocks::declare_conv_block(specs, stage("enc", i), i == 1 ? 1 : enc[i - 2], enc[i - 1]);
  }
  for (int j = 1; j < d; ++j) blocks::declare_msc(specs, stage("msc", j), dec[j]);
  if (cfg.use_mdsa) {
    for (int j = 1; j < d; ++j) blocks::declare_dspa(specs, stage("dspa", j), 2 * dec[j]);
  }
  for (const char* path : {"aux", "main"}) {
    const bool is_main = std::string(path) == "main";
    for (int j = 1; j < d; ++j) {
      const std::string p = stage(path, j);
      specs.push_back({p + ".up.weight", Shape{dec[j - 1], dec[j], 2, 2}, dec[j - 1]});
      specs.push_back({p + ".up.bias", Shape{dec[j]}, 0});
      blocks::declare_conv_block(specs, p, (is_main ? 3 : 2) * dec[j], dec[j]);
    }
  }
  blocks::declare_conv(specs, "head_aux", cfg.out_channels, dec[d - 1], 1);
  blocks::declare_conv(specs, "head_main", cfg.out_channels, dec[d - 1], 1);
  return specs;
}

template <typename T>
OmegaNet<T>::OmegaNet(ModelConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)), params_(blocks::initialize<T>(parameter_layout(cfg_), seed)) {}

template <typename T>
OmegaNet<T>::OmegaNet(ModelConfig cfg, ParameterSet<T> params)
    : cfg_(std::move(cfg)), params_(std::move(params)) {
  const auto layout = parameter_layout(cfg_);
  if (layout.size() != params_.size()) {
    throw ShapeError("parameter count " + std::to_string(params_.size()) + " does not match the " +
                     std::to_string(layout.size()) + " tensors required by the model config");
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (!params_.contains(layout[i].name)) throw ShapeError("missing parameter tensor " + layout[i].name);
    const auto& t = params_.at(layout[i].name);
    if (t.shape() != layout[i].shape) {
      throw ShapeError("parameter " + layout[i].name + " has shape " + shape_str(t.shape()) +
                       ", expected " + shape_str(layout[i].shape));
    }
  }
}

template <typename T>
void OmegaNet<T>::check_input(const Shape& s) const {
  if (s.size() != 4) throw ShapeError("network input must be N×1×H×W, got " + shape_str(s));
  if (s[1] != 1) throw ShapeError("network input channels (dim 1) must be 1, got " + std::to_string(s[1]));
  if (s[2] != cfg_.input_size || s[3] != cfg_.input_size) {
    throw ShapeError("network input spatial extent (dims 2,3) must be " +
                     std::to_string(cfg_.input_size) + "x" + std::to_string(cfg_.input_size) +
                     ", got " + shape_str(s));
  }
}

template <typename T>
std::vector<Var<T>> OmegaNet<T>::encode(const Binding<T>& b, const Var<T>& x) const {
  check_input(x->value.shape());
  std::vector<Var<T>> out;
  Var<T> cur = x;
  for (int i = 1; i <= cfg_.depth; ++i) {
    if (i > 1) cur = ops::maxpool2d(cur, 2);
    cur = blocks::conv_block(cur, blocks::bind_conv_block(b, stage("enc", i)));
    out.push_back(cur);
  }
  return out;
}

template <typename T>
std::vector<Var<T>> OmegaNet<T>::skip_features(const Binding<T>& b,
                                               const std::vector<Var<T>>& encoded) const {
  std::vector<Var<T>> skips;
  const int d = cfg_.depth;
  for (int j = 1; j < d; ++j) {
    skips.push_back(blocks::cascade_msc(encoded[d - j - 1], blocks::bind_msc(b, stage("msc", j))));
  }
  return skips;
}

template <typename T>
std::vector<Var<T>> OmegaNet<T>::decode_additional(const Binding<T>& b,
                                                   const std::vector<Var<T>>& encoded,
                                                   const std::vector<Var<T>>& skips) const {
  std::vector<Var<T>> out;
  Var<T> prev = encoded.back();
  for (int j = 1; j < cfg_.depth; ++j) {
    const std::string p = stage("aux", j);
    auto up = ops::transposed_conv2d(prev, b.get(p + ".up.weight"), b.get(p + ".up.bias"), 2);
    prev = blocks::conv_block(ops::concat_channels<T>({up, skips[j - 1]}),
                              blocks::bind_conv_block(b, p));
    out.push_back(prev);
  }
  return out;
}

template <typename T>
Var<T> OmegaNet<T>::decode_original(const Binding<T>& b, const std::vector<Var<T>>& encoded,
                                    const std::vector<Var<T>>& skips,
                                    const std::vector<Var<T>>& aux, ForwardTrace<T>* trace) const {
  Var<T> prev = encoded.back();
  for (int j = 1; j < cfg_.depth; ++j) {
    const std::string p = stage("main", j);
    auto up = ops::transposed_conv2d(prev, b.get(p + ".up.weight"), b.get(p + ".up.bias"), 2);
    auto skip = ops::concat_channels<T>({aux[j - 1], skips[j - 1]});
    if (cfg_.use_mdsa) skip = blocks::mdsa(skip, blocks::bind_dspa(b, stage("dspa", j), cfg_.k));
    prev = blocks::conv_block(ops::concat_channels<T>({up, skip}), blocks::bind_conv_block(b, p));
    if (trace) {
      trace->attended.push_back(skip->value);
      trace->main.push_back(prev->value);
    }
  }
  return prev;
}

template <typename T>
DualOutput<T> OmegaNet<T>::forward(const Binding<T>& b, const Var<T>& x,
                                   ForwardTrace<T>* trace) const {
  auto encoded = encode(b, x);
  auto skips = skip_features(b, encoded);
  auto aux = decode_additional(b, encoded, skips);
  if (trace) {
    for (const auto& v : encoded) trace->encoder.push_back(v->value);
    for (const auto& v : skips) trace->skips.push_back(v->value);
    for (const auto& v : aux) trace->aux.push_back(v->value);
  }
  auto main = decode_original(b, encoded, skips, aux, trace);
  DualOutput<T> out;
  out.aux_logits = blocks::apply_conv(aux.back(), blocks::bind_conv(b, "head_aux"));
  // Free encoder and decoder handles not needed past this point.
  encoded.clear();
  skips.clear();
  aux.clear();
  out.main_logits = blocks::apply_conv(main, blocks::bind_conv(b, "head_main"));
  return out;
}

template <typename T>
DualOutput<T> OmegaNet<T>::forward(Tape<T>& tape, const Tensor<T>& x, bool requires_grad,
                                   ForwardTrace<T>* trace) const {
  const Binding<T> b = bind(tape, requires_grad);
  return forward(b, tape.leaf(x, false), trace);
}

template <typename T>
Var<T> dual_loss(const DualOutput<T>& out, const Tensor<T>& mask, double lambda_s, double lambda_a) {
  auto main = ops::scale(ops::bce_with_logits(out.main_logits, mask), static_cast<T>(lambda_s));
  auto aux = ops::scale(ops::bce_with_logits(out.aux_logits, mask), static_cast<T>(lambda_a));
  return ops::add(main, aux);
}

template class OmegaNet<float>;
template class OmegaNet<double>;
template Var<float> dual_loss<float>(const DualOutput<float>&, const Tensor<float>&, double, double);
template Var<double> dual_loss<double>(const DualOutput<double>&, const Tensor<double>&, double,
                                       double);

}  // namespace omega
