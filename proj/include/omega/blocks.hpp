// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// Composite layers of the network: double convolution, cascade multi-scale
// convolution, dense spatial-position attention, channel attention, and the
// position-then-channel composition used on the original-path skips.
#pragma once

#include <string>

#include "omega/ops.hpp"
#include "omega/params.hpp"

namespace omega::blocks {

using kernels::ConvGeometry;

template <typename T>
struct ConvParams {
  Var<T> weight;  // O×I×kH×kW
  Var<T> bias;    // O
  ConvGeometry geom;
};

/// conv(3×3) → relu → conv(3×3) → relu, spatial extents preserved.
template <typename T>
struct ConvBlockParams {
  ConvParams<T> conv1;
  ConvParams<T> conv2;
};

/// 5×5, 3×3 and 1×1 cascade branches plus the 4C→C 1×1 fuse.
template <typename T>
struct MscParams {
  ConvParams<T> conv5;
  ConvParams<T> conv3;
  ConvParams<T> conv1;
  ConvParams<T> fuse;
};

template <typename T>
struct DspaParams {
  ConvParams<T> dilated;  // 3×3, dilation 2, pad 2, C→C
  std::int64_t k = 10;
};

/// Optional capture of the internal attention tensors, for inspection and tests.
template <typename T>
struct AttentionTrace {
  Tensor<T> dense;      // DSPA: B×C×K
  Tensor<T> attention;  // DSPA: B×N×K, CA: B×C×C
};

template <typename T>
Var<T> apply_conv(const Var<T>& x, const ConvParams<T>& p);

template <typename T>
Var<T> conv_block(const Var<T>& x, const ConvBlockParams<T>& p);

/// X¹ = relu(conv5(X)), X² = relu(conv3(X+X¹)), X³ = relu(conv1(X+X²)),
/// Y = fuse(concat(X, X¹, X², X³)).
template <typename T>
Var<T> cascade_msc(const Var<T>& x, const MscParams<T>& p);

/// Per batch item, with M reshaped to C×N (N = H·W):
///   D = pool_K(relu(dilated_conv(M)))   C×K
///   A = softmax_rows(Mᵀ·D)              N×K
///   O = D·Aᵀ + M
template <typename T>
Var<T> dspa(const Var<T>& m, const DspaParams<T>& p, AttentionTrace<T>* trace = nullptr);

/// Per batch item: A′ = softmax_rows(M′·M′ᵀ) (C×C), O′ = A′·M′ + M′.
template <typename T>
Var<T> channel_attention(const Var<T>& m, AttentionTrace<T>* trace = nullptr);

/// channel_attention(dspa(m)).
template <typename T>
Var<T> mdsa(const Var<T>& m, const DspaParams<T>& p);

// Parameter declaration and binding by dotted prefix, e.g. "msc.1" →
// "msc.1.conv5.weight".

struct ParamSpec {
  std::string name;
  Shape shape;
  std::int64_t fan_in;  // 0 for biases
};

void declare_conv(std::vector<ParamSpec>& out, const std::string& prefix, std::int64_t out_ch,
                  std::int64_t in_ch, std::int64_t kernel);
void declare_conv_block(std::vector<ParamSpec>& out, const std::string& prefix, std::int64_t in_ch,
                        std::int64_t out_ch);
void declare_msc(std::vector<ParamSpec>& out, const std::string& prefix, std::int64_t channels);
void declare_dspa(std::vector<ParamSpec>& out, const std::string& prefix, std::int64_t channels);

template <typename T>
ConvParams<T> bind_conv(const Binding<T>& b, const std::string& prefix, ConvGeometry g = {});
template <typename T>
ConvBlockParams<T> bind_conv_block(const Binding<T>& b, const std::string& prefix);
template <typename T>
MscParams<T> bind_msc(const Binding<T>& b, const std::string& prefix);
template <typename T>
DspaParams<T> bind_dspa(const Binding<T>& b, const std::string& prefix, std::int64_t k);

/// Kaiming-uniform weights (bound √(6/fan_in)), zero biases, drawn in spec order.
template <typename T>
ParameterSet<T> initialize(const std::vector<ParamSpec>& specs, std::uint64_t seed);

}  // namespace omega::blocks
