// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// Raw numeric kernels. No graph recording happens here; the autodiff layer in
// ops.hpp composes these into differentiable operations.
#pragma once

#include <cstdint>
#include <vector>

#include "omega/tensor.hpp"

namespace omega::kernels {

enum class Trans : bool { kNo = false, kYes = true };

/// C[M×N] (+)= op(A)[M×K] · op(B)[K×N] with explicit leading dimensions.
/// Every output element is reduced in a fixed order, so results are
/// reproducible run to run.
template <typename T>
void gemm(Trans ta, Trans tb, std::int64_t m, std::int64_t n, std::int64_t k, const T* a,
          std::int64_t lda, const T* b, std::int64_t ldb, T* c, std::int64_t ldc, bool accumulate);

struct ConvGeometry {
  int stride = 1;
  int pad = 0;
  int dilation = 1;
};

std::int64_t conv_out_extent(std::int64_t in, std::int64_t kernel, const ConvGeometry& g);

template <typename T>
void im2col(const T* x, std::int64_t channels, std::int64_t h, std::int64_t w, std::int64_t kh,
            std::int64_t kw, const ConvGeometry& g, std::int64_t ho, std::int64_t wo,
            std::int64_t oy0, std::int64_t oy1, T* col);

/// Adjoint of im2col: scatters-and-adds columns back into x.
template <typename T>
void col2im(const T* col, std::int64_t channels, std::int64_t h, std::int64_t w, std::int64_t kh,
            std::int64_t kw, const ConvGeometry& g, std::int64_t ho, std::int64_t wo,
            std::int64_t oy0, std::int64_t oy1, T* x);

template <typename T>
struct ConvGrads {
  Tensor<T> dx;
  Tensor<T> dw;
  Tensor<T> db;
};

/// x: N×C×H×W, w: O×C×kH×kW, bias: O (may be null).
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>* bias,
                         const ConvGeometry& g);

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dout,
                             const ConvGeometry& g, bool need_dx);

/// x: N×I×H×W, w: I×O×kH×kW (input-major, like the adjoint conv's weight),
/// output spatial extent (H−1)·stride + kH.
template <typename T>
Tensor<T> conv_transpose2d_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>* bias,
                                   int stride);

template <typename T>
ConvGrads<T> conv_transpose2d_backward(const Tensor<T>& x, const Tensor<T>& w,
                                       const Tensor<T>& dout, int stride, bool need_dx);

template <typename T>
struct PoolResult {
  Tensor<T> out;
  std::vector<std::int64_t> argmax;  // flat input offsets, one per output element
};

template <typename T>
PoolResult<T> maxpool2d_forward(const Tensor<T>& x, int window);

template <typename T>
Tensor<T> maxpool2d_backward(const Tensor<T>& dout, const std::vector<std::int64_t>& argmax,
                             const Shape& in_shape);

}  // namespace omega::kernels
