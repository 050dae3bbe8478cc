// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "omega/autodiff.hpp"
#include "omega/kernels.hpp"

namespace omega::ops {

using kernels::ConvGeometry;

// Convolution family. `bias` may be null.
template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, ConvGeometry g = {});

/// weight: InC×OutC×kH×kW. Output extent is (H−1)·stride + kH.
template <typename T>
Var<T> transposed_conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias,
                         int stride = 2);

/// Non-overlapping max pool. Ties route the gradient to the first element in
/// row-major window order.
template <typename T>
Var<T> maxpool2d(const Var<T>& x, int window = 2);

/// N×C×H×W → N×C×K. The H·W positions, flattened row-major, are split into k
/// contiguous bins [⌊b·HW/k⌋, ⌊(b+1)·HW/k⌋) and averaged.
template <typename T>
Var<T> adaptive_avg_pool_to_k(const Var<T>& x, std::int64_t k);

/// op(a)·op(b) for rank-2 operands, or batched over a leading axis when both
/// are rank 3.
template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b, bool trans_a = false, bool trans_b = false);

/// Softmax over the last axis, stabilized by subtracting the row max.
template <typename T>
Var<T> softmax_rows(const Var<T>& x);

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T>
Var<T> scale(const Var<T>& x, T c);
template <typename T>
Var<T> relu(const Var<T>& x);
template <typename T>
Var<T> sigmoid(const Var<T>& x);

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& parts);
template <typename T>
Var<T> slice_channels(const Var<T>& x, std::int64_t begin, std::int64_t count);

template <typename T>
Var<T> reshape(const Var<T>& x, Shape shape);

template <typename T>
Var<T> sum(const Var<T>& x);
template <typename T>
Var<T> mean(const Var<T>& x);

/// Mean binary cross-entropy of sigmoid(logits) against a {0,1} mask, in the
/// stable form max(z,0) − z·y + log(1 + e^{−|z|}).
template <typename T>
Var<T> bce_with_logits(const Var<T>& logits, const Tensor<T>& mask);

// Plain-tensor helpers shared by the ops and by evaluation code.
template <typename T>
T stable_sigmoid(T z);
template <typename T>
Tensor<T> sigmoid_tensor(const Tensor<T>& x);

}  // namespace omega::ops
