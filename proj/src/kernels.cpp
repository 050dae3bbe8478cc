// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/kernels.hpp"

#include <algorithm>
#include <cstring>
#include <string>

namespace omega::kernels {

namespace {

constexpr std::int64_t kBlockK = 128;
constexpr std::int64_t kBlockN = 512;
constexpr std::int64_t kDotBlock = 1024;
// Upper bound on im2col scratch (elements) before the output rows are tiled.
constexpr std::int64_t kColBudget = std::int64_t{1} << 21;

// C += op(A)·B where B is K×N row-major. Inner loop runs over contiguous j.
template <typename T>
void gemm_axpy(bool ta, std::int64_t m, std::int64_t n, std::int64_t k, const T* a,
               std::int64_t lda, const T* b, std::int64_t ldb, T* c, std::int64_t ldc) {
  for (std::int64_t k0 = 0; k0 < k; k0 += kBlockK) {
    const std::int64_t k1 = std::min(k, k0 + kBlockK);
    for (std::int64_t j0 = 0; j0 < n; j0 += kBlockN) {
      const std::int64_t nb = std::min(n, j0 + kBlockN) - j0;
      for (std::int64_t i = 0; i < m; ++i) {
        T* __restrict crow = c + i * ldc + j0;
        for (std::int64_t kk = k0; kk < k1; ++kk) {
          const T av = ta ? a[kk * lda + i] : a[i * lda + kk];
          const T* __restrict brow = b + kk * ldb + j0;
          for (std::int64_t j = 0; j < nb; ++j) crow[j] += av * brow[j];
        }
      }
    }
  }
}

// C += A·Bᵀ where A is M×K and B is N×K, both row-major: contiguous dot
// products, with eight independent partial sums per dot.
template <typename T>
void gemm_dot(std::int64_t m, std::int64_t n, std::int64_t k, const T* a, std::int64_t lda,
              const T* b, std::int64_t ldb, T* c, std::int64_t ldc) {
  for (std::int64_t k0 = 0; k0 < k; k0 += kDotBlock) {
    const std::int64_t k1 = std::min(k, k0 + kDotBlock);
    for (std::int64_t i = 0; i < m; ++i) {
      const T* __restrict arow = a + i * lda;
      for (std::int64_t j = 0; j < n; ++j) {
        const T* __restrict brow = b + j * ldb;
        T acc[8] = {};
        std::int64_t kk = k0;
        for (; kk + 8 <= k1; kk += 8) {
          for (int l = 0; l < 8; ++l) acc[l] += arow[kk + l] * brow[kk + l];
        }
        T tail = 0;
        for (; kk < k1; ++kk) tail += arow[kk] * brow[kk];
        c[i * ldc + j] += ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
                          ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
      }
    }
  }
}

}  // namespace

template <typename T>
void gemm(Trans ta, Trans tb, std::int64_t m, std::int64_t n, std::int64_t k, const T* a,
          std::int64_t lda, const T* b, std::int64_t ldb, T* c, std::int64_t ldc,
          bool accumulate) {
  if (!accumulate) {
    for (std::int64_t i = 0; i < m; ++i) std::fill(c + i * ldc, c + i * ldc + n, T{0});
  }
  if (m == 0 || n == 0 || k == 0) return;
  const bool trans_a = ta == Trans::kYes;
  if (tb == Trans::kNo) {
    gemm_axpy(trans_a, m, n, k, a, lda, b, ldb, c, ldc);
    return;
  }
  if (!trans_a) {
    gemm_dot(m, n, k, a, lda, b, ldb, c, ldc);
    return;
  }
  // Aᵀ·Bᵀ: materialize Aᵀ (M×K) and fall back to the dot kernel.
  std::vector<T> at(static_cast<std::size_t>(m * k));
  for (std::int64_t kk = 0; kk < k; ++kk)
    for (std::int64_t i = 0; i < m; ++i) at[i * k + kk] = a[kk * lda + i];
  gemm_dot(m, n, k, at.data(), k, b, ldb, c, ldc);
}

std::int64_t conv_out_extent(std::int64_t in, std::int64_t kernel, const ConvGeometry& g) {
  const std::int64_t span = static_cast<std::int64_t>(g.dilation) * (kernel - 1) + 1;
  const std::int64_t padded = in + 2 * g.pad;
  if (padded < span) return 0;
  return (padded - span) / g.stride + 1;
}

template <typename T>
void im2col(const T* x, std::int64_t channels, std::int64_t h, std::int64_t w, std::int64_t kh,
            std::int64_t kw, const ConvGeometry& g, std::int64_t ho, std::int64_t wo,
            std::int64_t oy0, std::int64_t oy1, T* col) {
  (void)ho;
  const std::int64_t p = (oy1 - oy0) * wo;
  for (std::int64_t c = 0; c < channels; ++c) {
    const T* xc = x + c * h * w;
    for (std::int64_t i = 0; i < kh; ++i) {
      for (std::int64_t j = 0; j < kw; ++j) {
        T* dst = col + ((c * kh + i) * kw + j) * p;
        for (std::int64_t oy = oy0; oy < oy1; ++oy) {
          T* d = dst + (oy - oy0) * wo;
          const std::int64_t iy = oy * g.stride - g.pad + i * g.dilation;
          if (iy < 0 || iy >= h) {
            std::fill(d, d + wo, T{0});
            continue;
          }
          const T* xrow = xc + iy * w;
          for (std::int64_t ox = 0; ox < wo; ++ox) {
            const std::int64_t ix = ox * g.stride - g.pad + j * g.dilation;
            d[ox] = (ix >= 0 && ix < w) ? xrow[ix] : T{0};
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* col, std::int64_t channels, std::int64_t h, std::int64_t w, std::int64_t kh,
            std::int64_t kw, const ConvGeometry& g, std::int64_t ho, std::int64_t wo,
            std::int64_t oy0, std::int64_t oy1, T* x) {
  (void)ho;
  const std::int64_t p = (oy1 - oy0) * wo;
  for (std::int64_t c = 0; c < channels; ++c) {
    T* xc = x + c * h * w;
    for (std::int64_t i = 0; i < kh; ++i) {
      for (std::int64_t j = 0; j < kw; ++j) {
        const T* src = col + ((c * kh + i) * kw + j) * p;
        for (std::int64_t oy = oy0; oy < oy1; ++oy) {
          const std::int64_t iy = oy * g.stride - g.pad + i * g.dilation;
          if (iy < 0 || iy >= h) continue;
          const T* s = src + (oy - oy0) * wo;
          T* xrow = xc + iy * w;
          for (std::int64_t ox = 0; ox < wo; ++ox) {
            const std::int64_t ix = ox * g.stride - g.pad + j * g.dilation;
            if (ix >= 0 && ix < w) xrow[ix] += s[ox];
          }
        }
      }
    }
  }
}

namespace {

void require_rank4(const Shape& s, const char* what) {
  if (s.size() != 4) {
    throw ShapeError(std::string(what) + " must be rank 4, got " + shape_str(s));
  }
}

bool is_pointwise(std::int64_t kh, std::int64_t kw, const ConvGeometry& g) {
  return kh == 1 && kw == 1 && g.stride == 1 && g.pad == 0;
}

std::int64_t rows_per_chunk(std::int64_t col_rows, std::int64_t wo, std::int64_t ho) {
  const std::int64_t per_row = std::max<std::int64_t>(1, col_rows * wo);
  return std::clamp<std::int64_t>(kColBudget / per_row, 1, ho);
}

template <typename T>
void add_bias(T* out, const T* bias, std::int64_t channels, std::int64_t plane) {
  for (std::int64_t o = 0; o < channels; ++o) {
    T* dst = out + o * plane;
    const T b = bias[o];
    for (std::int64_t q = 0; q < plane; ++q) dst[q] += b;
  }
}

template <typename T>
Tensor<T> bias_grad(const Tensor<T>& dout) {
  const auto n = dout.dim(0), ch = dout.dim(1), plane = dout.dim(2) * dout.dim(3);
  Tensor<T> db(Shape{ch});
  for (std::int64_t b = 0; b < n; ++b)
    for (std::int64_t o = 0; o < ch; ++o) {
      const T* src = dout.ptr() + (b * ch + o) * plane;
      T acc = 0;
      for (std::int64_t q = 0; q < plane; ++q) acc += src[q];
      db[o] += acc;
    }
  return db;
}

}  // namespace

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>* bias,
                         const ConvGeometry& g) {
  require_rank4(x.shape(), "conv2d input");
  require_rank4(w.shape(), "conv2d weight");
  if (g.stride < 1 || g.dilation < 1 || g.pad < 0) {
    throw ShapeError("conv2d requires stride >= 1, dilation >= 1, padding >= 0");
  }
  const auto n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const auto o = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  if (w.dim(1) != c) {
    throw ShapeError("conv2d input channels (dim 1) = " + std::to_string(c) +
                     " but weight expects " + std::to_string(w.dim(1)));
  }
  if (bias && (bias->rank() != 1 || bias->dim(0) != o)) {
    throw ShapeError("conv2d bias must have shape (" + std::to_string(o) + "), got " +
                     shape_str(bias->shape()));
  }
  const auto ho = conv_out_extent(h, kh, g), wo = conv_out_extent(wd, kw, g);
  if (ho < 1 || wo < 1) {
    throw ShapeError("conv2d output spatial extent (dims 2,3) would be empty for input " +
                     shape_str(x.shape()) + " and kernel " + shape_str(w.shape()));
  }
  Tensor<T> out(Shape{n, o, ho, wo});
  const std::int64_t ckk = c * kh * kw, plane = ho * wo;
  if (is_pointwise(kh, kw, g)) {
    for (std::int64_t b = 0; b < n; ++b) {
      gemm(Trans::kNo, Trans::kNo, o, plane, c, w.ptr(), c, x.ptr() + b * c * h * wd, plane,
           out.ptr() + b * o * plane, plane, false);
    }
  } else {
    const std::int64_t chunk = rows_per_chunk(ckk, wo, ho);
    std::vector<T> col(static_cast<std::size_t>(ckk * chunk * wo));
    for (std::int64_t b = 0; b < n; ++b) {
      const T* xb = x.ptr() + b * c * h * wd;
      T* ob = out.ptr() + b * o * plane;
      for (std::int64_t oy0 = 0; oy0 < ho; oy0 += chunk) {
        const std::int64_t oy1 = std::min(ho, oy0 + chunk), p = (oy1 - oy0) * wo;
        im2col(xb, c, h, wd, kh, kw, g, ho, wo, oy0, oy1, col.data());
        gemm(Trans::kNo, Trans::kNo, o, p, ckk, w.ptr(), ckk, col.data(), p, ob + oy0 * wo, plane,
             false);
      }
    }
  }
  if (bias) {
    for (std::int64_t b = 0; b < n; ++b) add_bias(out.ptr() + b * o * plane, bias->ptr(), o, plane);
  }
  return out;
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dout,
                             const ConvGeometry& g, bool need_dx) {
  const auto n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const auto o = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const auto ho = dout.dim(2), wo = dout.dim(3);
  const std::int64_t ckk = c * kh * kw, plane = ho * wo;
  ConvGrads<T> grads{need_dx ? Tensor<T>(x.shape()) : Tensor<T>(), Tensor<T>(w.shape()),
                     bias_grad(dout)};
  if (is_pointwise(kh, kw, g)) {
    for (std::int64_t b = 0; b < n; ++b) {
      const T* xb = x.ptr() + b * c * h * wd;
      const T* db = dout.ptr() + b * o * plane;
      gemm(Trans::kNo, Trans::kYes, o, c, plane, db, plane, xb, plane, grads.dw.ptr(), c, true);
      if (need_dx) {
        gemm(Trans::kYes, Trans::kNo, c, plane, o, w.ptr(), c, db, plane,
             grads.dx.ptr() + b * c * h * wd, plane, false);
      }
    }
    return grads;
  }
  const std::int64_t chunk = rows_per_chunk(ckk, wo, ho);
  std::vector<T> col(static_cast<std::size_t>(ckk * chunk * wo));
  std::vector<T> dcol(need_dx ? col.size() : 0);
  for (std::int64_t b = 0; b < n; ++b) {
    const T* xb = x.ptr() + b * c * h * wd;
    const T* db = dout.ptr() + b * o * plane;
    for (std::int64_t oy0 = 0; oy0 < ho; oy0 += chunk) {
      const std::int64_t oy1 = std::min(ho, oy0 + chunk), p = (oy1 - oy0) * wo;
      im2col(xb, c, h, wd, kh, kw, g, ho, wo, oy0, oy1, col.data());
      gemm(Trans::kNo, Trans::kYes, o, ckk, p, db + oy0 * wo, plane, col.data(), p,
           grads.dw.ptr(), ckk, true);
      if (need_dx) {
        gemm(Trans::kYes, Trans::kNo, ckk, p, o, w.ptr(), ckk, db + oy0 * wo, plane, dcol.data(),
             p, false);
        col2im(dcol.data(), c, h, wd, kh, kw, g, ho, wo, oy0, oy1,
               grads.dx.ptr() + b * c * h * wd);
      }
    }
  }
  return grads;
}

template <typename T>
Tensor<T> conv_transpose2d_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>* bias,
                                   int stride) {
  require_rank4(x.shape(), "transposed_conv2d input");
  require_rank4(w.shape(), "transposed_conv2d weight");
  if (stride < 1) throw ShapeError("transposed_conv2d stride must be >= 1");
  const auto n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  if (w.dim(0) != ci) {
    throw ShapeError("transposed_conv2d input channels (dim 1) = " + std::to_string(ci) +
                     " but weight expects " + std::to_string(w.dim(0)));
  }
  const auto co = w.dim(1), kh = w.dim(2), kw = w.dim(3);
  if (bias && (bias->rank() != 1 || bias->dim(0) != co)) {
    throw ShapeError("transposed_conv2d bias must have shape (" + std::to_string(co) + ")");
  }
  const auto ho = (h - 1) * stride + kh, wo = (wd - 1) * stride + kw;
  const ConvGeometry g{stride, 0, 1};
  const std::int64_t rows = co * kh * kw, plane_in = h * wd, plane_out = ho * wo;
  Tensor<T> out(Shape{n, co, ho, wo});
  std::vector<T> col(static_cast<std::size_t>(rows * plane_in));
  for (std::int64_t b = 0; b < n; ++b) {
    gemm(Trans::kYes, Trans::kNo, rows, plane_in, ci, w.ptr(), rows, x.ptr() + b * ci * plane_in,
         plane_in, col.data(), plane_in, false);
    col2im(col.data(), co, ho, wo, kh, kw, g, h, wd, std::int64_t{0}, h,
           out.ptr() + b * co * plane_out);
  }
  if (bias) {
    for (std::int64_t b = 0; b < n; ++b)
      add_bias(out.ptr() + b * co * plane_out, bias->ptr(), co, plane_out);
  }
  return out;
}

template <typename T>
ConvGrads<T> conv_transpose2d_backward(const Tensor<T>& x, const Tensor<T>& w,
                                       const Tensor<T>& dout, int stride, bool need_dx) {
  const auto n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const auto co = w.dim(1), kh = w.dim(2), kw = w.dim(3);
  const auto ho = dout.dim(2), wo = dout.dim(3);
  const ConvGeometry g{stride, 0, 1};
  const std::int64_t rows = co * kh * kw, plane_in = h * wd, plane_out = ho * wo;
  ConvGrads<T> grads{need_dx ? Tensor<T>(x.shape()) : Tensor<T>(), Tensor<T>(w.shape()),
                     bias_grad(dout)};
  std::vector<T> dcol(static_cast<std::size_t>(rows * plane_in));
  for (std::int64_t b = 0; b < n; ++b) {
    im2col(dout.ptr() + b * co * plane_out, co, ho, wo, kh, kw, g, h, wd, std::int64_t{0}, h,
           dcol.data());
    const T* xb = x.ptr() + b * ci * plane_in;
    gemm(Trans::kNo, Trans::kYes, ci, rows, plane_in, xb, plane_in, dcol.data(), plane_in,
         grads.dw.ptr(), rows, true);
    if (need_dx) {
      gemm(Trans::kNo, Trans::kNo, ci, plane_in, rows, w.ptr(), rows, dcol.data(), plane_in,
           grads.dx.ptr() + b * ci * plane_in, plane_in, false);
    }
  }
  return grads;
}

template <typename T>
PoolResult<T> maxpool2d_forward(const Tensor<T>& x, int window) {
  require_rank4(x.shape(), "maxpool2d input");
  const auto n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (window < 1) throw ShapeError("maxpool2d window must be >= 1");
  if (h % window != 0) {
    throw ShapeError("maxpool2d height (dim 2) = " + std::to_string(h) +
                     " is not divisible by window " + std::to_string(window));
  }
  if (w % window != 0) {
    throw ShapeError("maxpool2d width (dim 3) = " + std::to_string(w) +
                     " is not divisible by window " + std::to_string(window));
  }
  const auto ho = h / window, wo = w / window;
  PoolResult<T> r{Tensor<T>(Shape{n, c, ho, wo}), {}};
  r.argmax.resize(r.out.numel());
  std::size_t q = 0;
  for (std::int64_t plane = 0; plane < n * c; ++plane) {
    const std::int64_t base = plane * h * w;
    for (std::int64_t oy = 0; oy < ho; ++oy)
      for (std::int64_t ox = 0; ox < wo; ++ox, ++q) {
        std::int64_t best = base + (oy * window) * w + ox * window;
        for (std::int64_t i = 0; i < window; ++i)
          for (std::int64_t j = 0; j < window; ++j) {
            const std::int64_t off = base + (oy * window + i) * w + ox * window + j;
            if (x[off] > x[best]) best = off;
          }
        r.out[q] = x[best];
        r.argmax[q] = best;
      }
  }
  return r;
}

template <typename T>
Tensor<T> maxpool2d_backward(const Tensor<T>& dout, const std::vector<std::int64_t>& argmax,
                             const Shape& in_shape) {
  Tensor<T> dx(in_shape);
  for (std::size_t q = 0; q < argmax.size(); ++q) dx[argmax[q]] += dout[q];
  return dx;
}

#define OMEGA_INSTANTIATE_KERNELS(T)                                                           \
  template void gemm<T>(Trans, Trans, std::int64_t, std::int64_t, std::int64_t, const T*,     \
                        std::int64_t, const T*, std::int64_t, T*, std::int64_t, bool);        \
  template void im2col<T>(const T*, std::int64_t, std::int64_t, std::int64_t, std::int64_t,   \
                          std::int64_t, const ConvGeometry&, std::int64_t, std::int64_t,      \
                          std::int64_t, std::int64_t, T*);                                    \
  template void col2im<T>(const T*, std::int64_t, std::int64_t, std::int64_t, std::int64_t,   \
                          std::int64_t, const ConvGeometry&, std::int64_t, std::int64_t,      \
                          std::int64_t, std::int64_t, T*);                                    \
  template Tensor<T> conv2d_forward<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>*, \
                                       const ConvGeometry&);                                  \
  template ConvGrads<T> conv2d_backward<T>(const Tensor<T>&, const Tensor<T>&,               \
                                           const Tensor<T>&, const ConvGeometry&, bool);      \
  template Tensor<T> conv_transpose2d_forward<T>(const Tensor<T>&, const Tensor<T>&,         \
                                                 const Tensor<T>*, int);                      \
  template ConvGrads<T> conv_transpose2d_backward<T>(const Tensor<T>&, const Tensor<T>&,     \
                                                     const Tensor<T>&, int, bool);            \
  template PoolResult<T> maxpool2d_forward<T>(const Tensor<T>&, int);                        \
  template Tensor<T> maxpool2d_backward<T>(const Tensor<T>&, const std::vector<std::int64_t>&, \
                                           const Shape&);

OMEGA_INSTANTIATE_KERNELS(float)
OMEGA_INSTANTIATE_KERNELS(double)

#undef OMEGA_INSTANTIATE_KERNELS

}  // namespace omega::kernels
