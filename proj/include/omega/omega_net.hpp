// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// Encoder, twin expansive paths and output heads.
//
//   encoder       E_1 = block(x), E_i = block(pool(E_{i-1})), i = 2..d
//   skips         S_j = msc(E_{d-j}), j = 1..d-1, shared by both decoders
//   aux path      A_j = block(concat(up(A_{j-1}), S_j)),            A_0 = E_d
//   main path     O_j = block(concat(up(O_{j-1}), mdsa(concat(A_j, S_j)))), O_0 = E_d
//   heads         1×1 convs on A_{d-1} and O_{d-1}, producing logits
#pragma once

#include <cstdint>
#include <vector>

#include "omega/blocks.hpp"

namespace omega {

struct ModelConfig {
  int depth = 5;
  std::vector<std::int64_t> encoder_channels{64, 128, 256, 512, 1024};
  std::vector<std::int64_t> decoder_channels{1024, 512, 256, 128, 64};
  std::int64_t out_channels = 2;
  std::int64_t k = 10;
  double lambda_s = 10.0;
  double lambda_a = 1.0;
  std::int64_t input_size = 512;
  /// When false, the main-path skips bypass the attention blocks (ablation).
  bool use_mdsa = true;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  /// Toy configuration with encoder channels base·2^i.
  static ModelConfig toy(int depth, std::int64_t base_channels, std::int64_t input_size,
                         std::int64_t k);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Names and shapes of every parameter, in a fixed order.
std::vector<blocks::ParamSpec> parameter_layout(const ModelConfig& cfg);

template <typename T>
struct DualOutput {
  Var<T> main_logits;
  Var<T> aux_logits;
};

/// Intermediate feature maps of one forward pass.
template <typename T>
struct ForwardTrace {
  std::vector<Tensor<T>> encoder;  // E_1..E_d
  std::vector<Tensor<T>> skips;    // S_1..S_{d-1}
  std::vector<Tensor<T>> aux;      // A_1..A_{d-1}
  std::vector<Tensor<T>> attended; // mdsa outputs, 1..d-1
  std::vector<Tensor<T>> main;     // O_1..O_{d-1}
};

template <typename T>
class OmegaNet {
 public:
  OmegaNet(ModelConfig cfg, std::uint64_t seed);
  /// Adopts existing parameters; every name and shape is checked against the layout.
  OmegaNet(ModelConfig cfg, ParameterSet<T> params);

  const ModelConfig& config() const noexcept { return cfg_; }
  const ParameterSet<T>& parameters() const noexcept { return params_; }
  ParameterSet<T>& parameters() noexcept { return params_; }

  Binding<T> bind(Tape<T>& tape, bool requires_grad) const {
    return Binding<T>(params_, tape, requires_grad);
  }

  DualOutput<T> forward(const Binding<T>& b, const Var<T>& x, ForwardTrace<T>* trace = nullptr) const;

  /// Convenience: binds parameters and lifts x onto the tape.
  DualOutput<T> forward(Tape<T>& tape, const Tensor<T>& x, bool requires_grad,
                        ForwardTrace<T>* trace = nullptr) const;

  std::vector<Var<T>> encode(const Binding<T>& b, const Var<T>& x) const;
  std::vector<Var<T>> skip_features(const Binding<T>& b, const std::vector<Var<T>>& encoded) const;
  std::vector<Var<T>> decode_additional(const Binding<T>& b, const std::vector<Var<T>>& encoded,
                                        const std::vector<Var<T>>& skips) const;
  Var<T> decode_original(const Binding<T>& b, const std::vector<Var<T>>& encoded,
                         const std::vector<Var<T>>& skips, const std::vector<Var<T>>& aux,
                         ForwardTrace<T>* trace = nullptr) const;

  template <typename U>
  OmegaNet<U> cast() const {
    return OmegaNet<U>(cfg_, params_.template cast<U>());
  }

 private:
  void check_input(const Shape& s) const;

  ModelConfig cfg_;
  ParameterSet<T> params_;
};

/// λ_s·BCE(main) + λ_a·BCE(aux).
template <typename T>
Var<T> dual_loss(const DualOutput<T>& out, const Tensor<T>& mask, double lambda_s, double lambda_a);

extern template class OmegaNet<float>;
extern template class OmegaNet<double>;

}  // namespace omega
