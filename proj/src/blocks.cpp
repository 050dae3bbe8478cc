// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/blocks.hpp"

#include <cmath>

#include "omega/random.hpp"

namespace omega::blocks {

template <typename T>
Var<T> apply_conv(const Var<T>& x, const ConvParams<T>& p) {
  return ops::conv2d(x, p.weight, p.bias, p.geom);
}

template <typename T>
Var<T> conv_block(const Var<T>& x, const ConvBlockParams<T>& p) {
  return ops::relu(apply_conv(ops::relu(apply_conv(x, p.conv1)), p.conv2));
}

template <typename T>
Var<T> cascade_msc(const Var<T>& x, const MscParams<T>& p) {
  const auto x1 = ops::relu(apply_conv(x, p.conv5));
  const auto x2 = ops::relu(apply_conv(ops::add(x, x1), p.conv3));
  const auto x3 = ops::relu(apply_conv(ops::add(x, x2), p.conv1));
  return apply_conv(ops::concat_channels<T>({x, x1, x2, x3}), p.fuse);
}

template <typename T>
Var<T> dspa(const Var<T>& m, const DspaParams<T>& p, AttentionTrace<T>* trace) {
  const Shape s = m->value.shape();
  if (s.size() != 4) throw ShapeError("dspa input must be rank 4, got " + shape_str(s));
  const std::int64_t n = s[2] * s[3];
  if (n < p.k) {
    throw ShapeError("dspa: H*W = " + std::to_string(n) + " is smaller than K = " +
                     std::to_string(p.k));
  }
  const auto flat = ops::reshape(m, Shape{s[0], s[1], n});
  const auto dense = ops::adaptive_avg_pool_to_k(ops::relu(apply_conv(m, p.dilated)), p.k);
  const auto attn = ops::softmax_rows(ops::matmul(flat, dense, /*trans_a=*/true, false));
  const auto out = ops::add(ops::matmul(dense, attn, false, /*trans_b=*/true), flat);
  if (trace) {
    trace->dense = dense->value;
    trace->attention = attn->value;
  }
  return ops::reshape(out, s);
}

template <typename T>
Var<T> channel_attention(const Var<T>& m, AttentionTrace<T>* trace) {
  const Shape s = m->value.shape();
  if (s.size() != 4) throw ShapeError("channel_attention input must be rank 4, got " + shape_str(s));
  const auto flat = ops::reshape(m, Shape{s[0], s[1], s[2] * s[3]});
  const auto attn = ops::softmax_rows(ops::matmul(flat, flat, false, /*trans_b=*/true));
  const auto out = ops::add(ops::matmul(attn, flat), flat);
  if (trace) trace->attention = attn->value;
  return ops::reshape(out, s);
}

template <typename T>
Var<T> mdsa(const Var<T>& m, const DspaParams<T>& p) {
  return channel_attention(dspa(m, p));
}

void declare_conv(std::vector<ParamSpec>& out, const std::string& prefix, std::int64_t out_ch,
                  std::int64_t in_ch, std::int64_t kernel) {
  out.push_back({prefix + ".weight", Shape{out_ch, in_ch, kernel, kernel}, in_ch * kernel * kernel});
  out.push_back({prefix + ".bias", Shape{out_ch}, 0});
}

void declare_conv_block(std::vector<ParamSpec>& out, const std::string& prefix, std::int64_t in_ch,
                        std::int64_t out_ch) {
  declare_conv(out, prefix + ".conv1", out_ch, in_ch, 3);
  declare_conv(out, prefix + ".conv2", out_ch, out_ch, 3);
}

void declare_msc(std::vector<ParamSpec>& out, const std::string& prefix, std::int64_t channels) {
  declare_conv(out, prefix + ".conv5", channels, channels, 5);
  declare_conv(out, prefix + ".conv3", channels, channels, 3);
  declare_conv(out, prefix + ".conv1", channels, channels, 1);
  declare_conv(out, prefix + ".fuse", channels, 4 * channels, 1);
}

void declare_dspa(std::vector<ParamSpec>& out, const std::string& prefix, std::int64_t channels) {
  declare_conv(out, prefix + ".dilated", channels, channels, 3);
}

template <typename T>
ConvParams<T> bind_conv(const Binding<T>& b, const std::string& prefix, ConvGeometry g) {
  return {b.get(prefix + ".weight"), b.get(prefix + ".bias"), g};
}

template <typename T>
ConvBlockParams<T> bind_conv_block(const Binding<T>& b, const std::string& prefix) {
  return {bind_conv(b, prefix + ".conv1", {1, 1, 1}), bind_conv(b, prefix + ".conv2", {1, 1, 1})};
}

template <typename T>
MscParams<T> bind_msc(const Binding<T>& b, const std::string& prefix) {
  return {bind_conv(b, prefix + ".conv5", {1, 2, 1}), bind_conv(b, prefix + ".conv3", {1, 1, 1}),
          bind_conv(b, prefix + ".conv1", {1, 0, 1}), bind_conv(b, prefix + ".fuse", {1, 0, 1})};
}

template <typename T>
DspaParams<T> bind_dspa(const Binding<T>& b, const std::string& prefix, std::int64_t k) {
  return {bind_conv(b, prefix + ".dilated", {1, 2, 2}), k};
}

template <typename T>
ParameterSet<T> initialize(const std::vector<ParamSpec>& specs, std::uint64_t seed) {
  ParameterSet<T> params;
  Rng rng(seed);
  for (const auto& spec : specs) {
    Tensor<T> t(spec.shape);
    if (spec.fan_in > 0) {
      const double bound = std::sqrt(6.0 / static_cast<double>(spec.fan_in));
      for (auto& v : t.data()) v = static_cast<T>(rng.uniform(-bound, bound));
    }
    params.add(spec.name, std::move(t));
  }
  return params;
}

#define OMEGA_INSTANTIATE_BLOCKS(T)                                                              \
  template Var<T> apply_conv<T>(const Var<T>&, const ConvParams<T>&);                           \
  template Var<T> conv_block<T>(const Var<T>&, const ConvBlockParams<T>&);                      \
  template Var<T> cascade_msc<T>(const Var<T>&, const MscParams<T>&);                           \
  template Var<T> dspa<T>(const Var<T>&, const DspaParams<T>&, AttentionTrace<T>*);             \
  template Var<T> channel_attention<T>(const Var<T>&, AttentionTrace<T>*);                      \
  template Var<T> mdsa<T>(const Var<T>&, const DspaParams<T>&);                                 \
  template ConvParams<T> bind_conv<T>(const Binding<T>&, const std::string&, ConvGeometry);     \
  template ConvBlockParams<T> bind_conv_block<T>(const Binding<T>&, const std::string&);        \
  template MscParams<T> bind_msc<T>(const Binding<T>&, const std::string&);                     \
  template DspaParams<T> bind_dspa<T>(const Binding<T>&, const std::string&, std::int64_t);     \
  template ParameterSet<T> initialize<T>(const std::vector<ParamSpec>&, std::uint64_t);

OMEGA_INSTANTIATE_BLOCKS(float)
OMEGA_INSTANTIATE_BLOCKS(double)

#undef OMEGA_INSTANTIATE_BLOCKS

}  // namespace omega::blocks
