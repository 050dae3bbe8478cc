// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scalar-loop reference implementations. These deliberately share no code
// with the im2col/GEMM paths or the tape; they exist to check them.
#pragma once

#include <cstdint>

#include "omega/metrics.hpp"
#include "omega/tensor.hpp"

namespace omega::verify {

using T64 = Tensor<double>;

T64 conv2d_naive(const T64& x, const T64& w, const T64& b, int stride, int pad, int dilation);

/// Scatter-accumulate: every input pixel stamps its weighted kernel into the output.
T64 transposed_conv2d_naive(const T64& x, const T64& w, const T64& b, int stride);

T64 maxpool2d_naive(const T64& x, int window);

/// Two-pass exp/sum without max subtraction.
T64 softmax_rows_naive(const T64& x);

T64 matmul_naive(const T64& a, const T64& b);

T64 adaptive_avg_pool_naive(const T64& x, std::int64_t k);

/// Position attention, literally: for every pixel j and dense column i,
/// a_{j,i} = exp(D_i·M_j) / Σ_i' exp(D_i'·M_j), O_j = Σ_i a_{j,i} D_i + M_j,
/// with D = bin-mean pooling of relu(dilated conv(M)).
T64 dspa_naive(const T64& m, const T64& dilated_w, const T64& dilated_b, std::int64_t k,
               T64* attention = nullptr);

/// Channel attention, literally: a'_{j,i} = exp(M'_i·M'_j) / Σ_i' exp(M'_i'·M'_j),
/// O'_j = Σ_i a'_{j,i} M'_i + M'_j.
T64 channel_attention_naive(const T64& m, T64* attention = nullptr);

struct MscWeights {
  T64 w5, b5, w3, b3, w1, b1, wf, bf;
};
T64 cascade_msc_naive(const T64& x, const MscWeights& p);

/// −mean[y·log σ(z) + (1−y)·log(1−σ(z))] evaluated directly.
double bce_naive(const T64& logits, const T64& mask);

/// Per-pixel counting with the empty-denominator convention.
train::MetricsReport metrics_naive(const Tensor<float>& prob, const Tensor<float>& mask, double threshold);

T64 relu_naive(const T64& x);
T64 add_naive(const T64& a, const T64& b);

}  // namespace omega::verify
