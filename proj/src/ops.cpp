// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace omega::ops {

namespace {

template <typename T>
Tape<T>& tape_of(const Var<T>& v) {
  if (!v || !v->tape) throw std::invalid_argument("operand is not attached to a tape");
  return *v->tape;
}

template <typename T>
void require_same_shape(const Var<T>& a, const Var<T>& b, const char* op) {
  const auto& sa = a->value.shape();
  const auto& sb = b->value.shape();
  if (sa.size() != sb.size()) {
    throw ShapeError(std::string(op) + ": rank mismatch " + shape_str(sa) + " vs " + shape_str(sb));
  }
  for (std::size_t i = 0; i < sa.size(); ++i) {
    if (sa[i] != sb[i]) {
      throw ShapeError(std::string(op) + ": dim " + std::to_string(i) + " differs (" +
                       std::to_string(sa[i]) + " vs " + std::to_string(sb[i]) + ")");
    }
  }
}

template <typename T>
Tensor<T> map(const Tensor<T>& x, auto&& f) {
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = f(x[i]);
  return out;
}

}  // namespace

template <typename T>
T stable_sigmoid(T z) {
  if (z >= 0) return T{1} / (T{1} + std::exp(-z));
  const T e = std::exp(z);
  return e / (T{1} + e);
}

template <typename T>
Tensor<T> sigmoid_tensor(const Tensor<T>& x) {
  return map(x, [](T v) { return stable_sigmoid(v); });
}

template <typename T>
Var<T> conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, ConvGeometry g) {
  auto out = kernels::conv2d_forward(x->value, weight->value, bias ? &bias->value : nullptr, g);
  return tape_of(x).record(std::move(out), {&x, &weight, &bias},
                           [x, weight, bias, g](const Node<T>&, const Tensor<T>& go) {
                             auto gr = kernels::conv2d_backward(x->value, weight->value, go, g,
                                                                x->requires_grad);
                             if (x->requires_grad) x->accumulate(std::move(gr.dx));
                             if (weight->requires_grad) weight->accumulate(std::move(gr.dw));
                             if (bias && bias->requires_grad) bias->accumulate(std::move(gr.db));
                           });
}

template <typename T>
Var<T> transposed_conv2d(const Var<T>& x, const Var<T>& weight, const Var<T>& bias, int stride) {
  auto out = kernels::conv_transpose2d_forward(x->value, weight->value,
                                               bias ? &bias->value : nullptr, stride);
  return tape_of(x).record(
      std::move(out), {&x, &weight, &bias},
      [x, weight, bias, stride](const Node<T>&, const Tensor<T>& go) {
        auto gr = kernels::conv_transpose2d_backward(x->value, weight->value, go, stride,
                                                     x->requires_grad);
        if (x->requires_grad) x->accumulate(std::move(gr.dx));
        if (weight->requires_grad) weight->accumulate(std::move(gr.dw));
        if (bias && bias->requires_grad) bias->accumulate(std::move(gr.db));
      });
}

template <typename T>
Var<T> maxpool2d(const Var<T>& x, int window) {
  auto r = kernels::maxpool2d_forward(x->value, window);
  auto argmax = std::make_shared<std::vector<std::int64_t>>(std::move(r.argmax));
  return tape_of(x).record(std::move(r.out), {&x},
                           [x, argmax](const Node<T>&, const Tensor<T>& go) {
                             x->accumulate(kernels::maxpool2d_backward(go, *argmax, x->value.shape()));
                           });
}

template <typename T>
Var<T> adaptive_avg_pool_to_k(const Var<T>& x, std::int64_t k) {
  const auto& s = x->value.shape();
  if (s.size() != 4) throw ShapeError("adaptive_avg_pool_to_k input must be rank 4, got " + shape_str(s));
  const std::int64_t n = s[0], c = s[1], positions = s[2] * s[3];
  if (k < 1 || k > positions) {
    throw ShapeError("adaptive_avg_pool_to_k: k = " + std::to_string(k) +
                     " must lie in [1, H*W = " + std::to_string(positions) + "]");
  }
  Tensor<T> out(Shape{n, c, k});
  const T* src = x->value.ptr();
  for (std::int64_t plane = 0; plane < n * c; ++plane) {
    const T* p = src + plane * positions;
    for (std::int64_t b = 0; b < k; ++b) {
      const std::int64_t lo = b * positions / k, hi = (b + 1) * positions / k;
      T acc = 0;
      for (std::int64_t q = lo; q < hi; ++q) acc += p[q];
      out[plane * k + b] = acc / static_cast<T>(hi - lo);
    }
  }
  return tape_of(x).record(std::move(out), {&x}, [x, k](const Node<T>&, const Tensor<T>& go) {
    const auto& shp = x->value.shape();
    const std::int64_t planes = shp[0] * shp[1], npos = shp[2] * shp[3];
    Tensor<T> dx(shp);
    for (std::int64_t plane = 0; plane < planes; ++plane)
      for (std::int64_t b = 0; b < k; ++b) {
        const std::int64_t lo = b * npos / k, hi = (b + 1) * npos / k;
        const T g = go[plane * k + b] / static_cast<T>(hi - lo);
        for (std::int64_t q = lo; q < hi; ++q) dx[plane * npos + q] = g;
      }
    x->accumulate(std::move(dx));
  });
}

namespace {

struct MatDims {
  std::int64_t batch, rows, cols;
};

MatDims mat_dims(const Shape& s, const char* which) {
  if (s.size() == 2) return {1, s[0], s[1]};
  if (s.size() == 3) return {s[0], s[1], s[2]};
  throw ShapeError(std::string("matmul operand ") + which + " must be rank 2 or 3, got " +
                   shape_str(s));
}

}  // namespace

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b, bool trans_a, bool trans_b) {
  using kernels::Trans;
  const auto& sa = a->value.shape();
  const auto& sb = b->value.shape();
  if (sa.size() != sb.size()) {
    throw ShapeError("matmul operands must share rank: " + shape_str(sa) + " vs " + shape_str(sb));
  }
  const MatDims da = mat_dims(sa, "a"), db = mat_dims(sb, "b");
  if (da.batch != db.batch) {
    throw ShapeError("matmul batch extent (dim 0) differs: " + std::to_string(da.batch) + " vs " +
                     std::to_string(db.batch));
  }
  const std::int64_t m = trans_a ? da.cols : da.rows;
  const std::int64_t ka = trans_a ? da.rows : da.cols;
  const std::int64_t kb = trans_b ? db.cols : db.rows;
  const std::int64_t n = trans_b ? db.rows : db.cols;
  if (ka != kb) {
    throw ShapeError("matmul inner extents differ: " + std::to_string(ka) + " vs " +
                     std::to_string(kb));
  }
  const std::int64_t batch = da.batch, k = ka;
  Shape out_shape = sa.size() == 2 ? Shape{m, n} : Shape{batch, m, n};
  Tensor<T> out(out_shape);
  const Trans ta = trans_a ? Trans::kYes : Trans::kNo;
  const Trans tb = trans_b ? Trans::kYes : Trans::kNo;
  const std::int64_t sza = da.rows * da.cols, szb = db.rows * db.cols, szc = m * n;
  for (std::int64_t i = 0; i < batch; ++i) {
    kernels::gemm(ta, tb, m, n, k, a->value.ptr() + i * sza, da.cols, b->value.ptr() + i * szb,
                  db.cols, out.ptr() + i * szc, n, false);
  }
  return tape_of(a).record(
      std::move(out), {&a, &b},
      [a, b, trans_a, trans_b, da, db, m, n, k, batch](const Node<T>&, const Tensor<T>& go) {
        const std::int64_t szA = da.rows * da.cols, szB = db.rows * db.cols, szC = m * n;
        const auto yes = Trans::kYes, no = Trans::kNo;
        if (a->requires_grad) {
          Tensor<T> ga(a->value.shape());
          for (std::int64_t i = 0; i < batch; ++i) {
            const T* g = go.ptr() + i * szC;
            const T* bv = b->value.ptr() + i * szB;
            T* dst = ga.ptr() + i * szA;
            if (!trans_a) {
              kernels::gemm(no, trans_b ? no : yes, m, k, n, g, n, bv, db.cols, dst, k, false);
            } else {
              kernels::gemm(trans_b ? yes : no, yes, k, m, n, bv, db.cols, g, n, dst, m, false);
            }
          }
          a->accumulate(std::move(ga));
        }
        if (b->requires_grad) {
          Tensor<T> gb(b->value.shape());
          for (std::int64_t i = 0; i < batch; ++i) {
            const T* g = go.ptr() + i * szC;
            const T* av = a->value.ptr() + i * szA;
            T* dst = gb.ptr() + i * szB;
            if (!trans_b) {
              kernels::gemm(trans_a ? no : yes, no, k, n, m, av, da.cols, g, n, dst, n, false);
            } else {
              kernels::gemm(yes, trans_a ? yes : no, n, k, m, g, n, av, da.cols, dst, k, false);
            }
          }
          b->accumulate(std::move(gb));
        }
      });
}

template <typename T>
Var<T> softmax_rows(const Var<T>& x) {
  const auto& s = x->value.shape();
  const std::int64_t cols = s.back();
  const std::int64_t rows = static_cast<std::int64_t>(x->value.numel()) / cols;
  Tensor<T> out(s);
  for (std::int64_t r = 0; r < rows; ++r) {
    const T* in = x->value.ptr() + r * cols;
    T* o = out.ptr() + r * cols;
    T mx = in[0];
    for (std::int64_t j = 1; j < cols; ++j) mx = std::max(mx, in[j]);
    T denom = 0;
    for (std::int64_t j = 0; j < cols; ++j) {
      o[j] = std::exp(in[j] - mx);
      denom += o[j];
    }
    for (std::int64_t j = 0; j < cols; ++j) o[j] /= denom;
  }
  return tape_of(x).record(std::move(out), {&x},
                           [x, rows, cols](const Node<T>& self, const Tensor<T>& go) {
                             const Tensor<T>& y = self.value;
                             Tensor<T> dx(y.shape());
                             for (std::int64_t r = 0; r < rows; ++r) {
                               const T* yr = y.ptr() + r * cols;
                               const T* gr = go.ptr() + r * cols;
                               T dot = 0;
                               for (std::int64_t j = 0; j < cols; ++j) dot += yr[j] * gr[j];
                               T* d = dx.ptr() + r * cols;
                               for (std::int64_t j = 0; j < cols; ++j) d[j] = yr[j] * (gr[j] - dot);
                             }
                             x->accumulate(std::move(dx));
                           });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "add");
  Tensor<T> out(a->value.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] + b->value[i];
  return tape_of(a).record(std::move(out), {&a, &b}, [a, b](const Node<T>&, const Tensor<T>& go) {
    if (a->requires_grad) a->accumulate(go);
    if (b->requires_grad) b->accumulate(go);
  });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  require_same_shape(a, b, "mul");
  Tensor<T> out(a->value.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = a->value[i] * b->value[i];
  return tape_of(a).record(std::move(out), {&a, &b}, [a, b](const Node<T>&, const Tensor<T>& go) {
    if (a->requires_grad) {
      Tensor<T> g(go.shape());
      for (std::size_t i = 0; i < g.numel(); ++i) g[i] = go[i] * b->value[i];
      a->accumulate(std::move(g));
    }
    if (b->requires_grad) {
      Tensor<T> g(go.shape());
      for (std::size_t i = 0; i < g.numel(); ++i) g[i] = go[i] * a->value[i];
      b->accumulate(std::move(g));
    }
  });
}

template <typename T>
Var<T> scale(const Var<T>& x, T c) {
  return tape_of(x).record(map(x->value, [c](T v) { return v * c; }), {&x},
                           [x, c](const Node<T>&, const Tensor<T>& go) {
                             x->accumulate(map(go, [c](T v) { return v * c; }));
                           });
}

template <typename T>
Var<T> relu(const Var<T>& x) {
  return tape_of(x).record(map(x->value, [](T v) { return v > 0 ? v : T{0}; }), {&x},
                           [x](const Node<T>&, const Tensor<T>& go) {
                             Tensor<T> dx(go.shape());
                             for (std::size_t i = 0; i < dx.numel(); ++i)
                               dx[i] = x->value[i] > 0 ? go[i] : T{0};
                             x->accumulate(std::move(dx));
                           });
}

template <typename T>
Var<T> sigmoid(const Var<T>& x) {
  return tape_of(x).record(sigmoid_tensor(x->value), {&x},
                           [x](const Node<T>& self, const Tensor<T>& go) {
                             Tensor<T> dx(go.shape());
                             for (std::size_t i = 0; i < dx.numel(); ++i) {
                               const T y = self.value[i];
                               dx[i] = go[i] * y * (T{1} - y);
                             }
                             x->accumulate(std::move(dx));
                           });
}

template <typename T>
Var<T> concat_channels(const std::vector<Var<T>>& parts) {
  if (parts.empty()) throw ShapeError("concat_channels needs at least one part");
  const Shape& s0 = parts[0]->value.shape();
  if (s0.size() != 4) throw ShapeError("concat_channels parts must be rank 4, got " + shape_str(s0));
  std::int64_t channels = 0;
  for (const auto& p : parts) {
    const Shape& s = p->value.shape();
    if (s.size() != 4) throw ShapeError("concat_channels parts must be rank 4, got " + shape_str(s));
    for (std::size_t d : {0u, 2u, 3u}) {
      if (s[d] != s0[d]) {
        throw ShapeError("concat_channels: dim " + std::to_string(d) + " differs (" +
                         std::to_string(s[d]) + " vs " + std::to_string(s0[d]) + ")");
      }
    }
    channels += s[1];
  }
  const std::int64_t n = s0[0], plane = s0[2] * s0[3];
  Tensor<T> out(Shape{n, channels, s0[2], s0[3]});
  std::int64_t offset = 0;
  for (const auto& p : parts) {
    const std::int64_t c = p->value.dim(1);
    for (std::int64_t b = 0; b < n; ++b) {
      std::copy_n(p->value.ptr() + b * c * plane, c * plane,
                  out.ptr() + (b * channels + offset) * plane);
    }
    offset += c;
  }
  Tape<T>& tape = tape_of(parts[0]);
  // record() takes a fixed initializer list; pass any part that needs a gradient.
  auto it = std::find_if(parts.begin(), parts.end(), [](const Var<T>& p) { return p->requires_grad; });
  const Var<T>& flag = it != parts.end() ? *it : parts[0];
  return tape.record(std::move(out), {&flag}, [parts, n, channels, plane](const Node<T>&, const Tensor<T>& go) {
    std::int64_t off = 0;
    for (const auto& p : parts) {
      const std::int64_t c = p->value.dim(1);
      if (p->requires_grad) {
        Tensor<T> g(p->value.shape());
        for (std::int64_t b = 0; b < n; ++b) {
          std::copy_n(go.ptr() + (b * channels + off) * plane, c * plane, g.ptr() + b * c * plane);
        }
        p->accumulate(std::move(g));
      }
      off += c;
    }
  });
}

template <typename T>
Var<T> slice_channels(const Var<T>& x, std::int64_t begin, std::int64_t count) {
  const Shape& s = x->value.shape();
  if (s.size() != 4) throw ShapeError("slice_channels input must be rank 4");
  if (begin < 0 || count < 1 || begin + count > s[1]) {
    throw ShapeError("slice_channels: range [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") exceeds channel extent (dim 1) " +
                     std::to_string(s[1]));
  }
  const std::int64_t n = s[0], c = s[1], plane = s[2] * s[3];
  Tensor<T> out(Shape{n, count, s[2], s[3]});
  for (std::int64_t b = 0; b < n; ++b)
    std::copy_n(x->value.ptr() + (b * c + begin) * plane, count * plane,
                out.ptr() + b * count * plane);
  return tape_of(x).record(std::move(out), {&x},
                           [x, n, c, begin, count, plane](const Node<T>&, const Tensor<T>& go) {
                             Tensor<T> dx(x->value.shape());
                             for (std::int64_t b = 0; b < n; ++b)
                               std::copy_n(go.ptr() + b * count * plane, count * plane,
                                           dx.ptr() + (b * c + begin) * plane);
                             x->accumulate(std::move(dx));
                           });
}

template <typename T>
Var<T> reshape(const Var<T>& x, Shape shape) {
  auto out = x->value.reshaped(std::move(shape));
  return tape_of(x).record(std::move(out), {&x}, [x](const Node<T>&, const Tensor<T>& go) {
    x->accumulate(go.reshaped(x->value.shape()));
  });
}

template <typename T>
Var<T> sum(const Var<T>& x) {
  T acc = 0;
  for (T v : x->value.data()) acc += v;
  return tape_of(x).record(Tensor<T>::scalar(acc), {&x}, [x](const Node<T>&, const Tensor<T>& go) {
    x->accumulate(Tensor<T>(x->value.shape(), go[0]));
  });
}

template <typename T>
Var<T> mean(const Var<T>& x) {
  return scale(sum(x), T{1} / static_cast<T>(x->value.numel()));
}

template <typename T>
Var<T> bce_with_logits(const Var<T>& logits, const Tensor<T>& mask) {
  if (logits->value.shape() != mask.shape()) {
    throw ShapeError("bce: logits shape " + shape_str(logits->value.shape()) +
                     " differs from mask shape " + shape_str(mask.shape()));
  }
  for (std::size_t i = 0; i < mask.numel(); ++i) {
    if (mask[i] != T{0} && mask[i] != T{1}) {
      throw std::invalid_argument("bce: mask must be binary; element " + std::to_string(i) +
                                  " is " + std::to_string(mask[i]));
    }
  }
  const T* z = logits->value.ptr();
  const std::size_t count = mask.numel();
  T acc = 0;
  for (std::size_t i = 0; i < count; ++i) {
    acc += std::max(z[i], T{0}) - z[i] * mask[i] + std::log1p(std::exp(-std::abs(z[i])));
  }
  const T inv = T{1} / static_cast<T>(count);
  return tape_of(logits).record(Tensor<T>::scalar(acc * inv), {&logits},
                                [logits, mask, inv](const Node<T>&, const Tensor<T>& go) {
                                  Tensor<T> g(mask.shape());
                                  const T s = go[0] * inv;
                                  for (std::size_t i = 0; i < g.numel(); ++i)
                                    g[i] = (stable_sigmoid(logits->value[i]) - mask[i]) * s;
                                  logits->accumulate(std::move(g));
                                });
}

#define OMEGA_INSTANTIATE_OPS(T)                                                                  \
  template T stable_sigmoid<T>(T);                                                                \
  template Tensor<T> sigmoid_tensor<T>(const Tensor<T>&);                                         \
  template Var<T> conv2d<T>(const Var<T>&, const Var<T>&, const Var<T>&, ConvGeometry);           \
  template Var<T> transposed_conv2d<T>(const Var<T>&, const Var<T>&, const Var<T>&, int);         \
  template Var<T> maxpool2d<T>(const Var<T>&, int);                                               \
  template Var<T> adaptive_avg_pool_to_k<T>(const Var<T>&, std::int64_t);                         \
  template Var<T> matmul<T>(const Var<T>&, const Var<T>&, bool, bool);                            \
  template Var<T> softmax_rows<T>(const Var<T>&);                                                 \
  template Var<T> add<T>(const Var<T>&, const Var<T>&);                                           \
  template Var<T> mul<T>(const Var<T>&, const Var<T>&);                                           \
  template Var<T> scale<T>(const Var<T>&, T);                                                     \
  template Var<T> relu<T>(const Var<T>&);                                                         \
  template Var<T> sigmoid<T>(const Var<T>&);                                                      \
  template Var<T> concat_channels<T>(const std::vector<Var<T>>&);                                 \
  template Var<T> slice_channels<T>(const Var<T>&, std::int64_t, std::int64_t);                   \
  template Var<T> reshape<T>(const Var<T>&, Shape);                                               \
  template Var<T> sum<T>(const Var<T>&);                                                          \
  template Var<T> mean<T>(const Var<T>&);                                                         \
  template Var<T> bce_with_logits<T>(const Var<T>&, const Tensor<T>&);

OMEGA_INSTANTIATE_OPS(float)
OMEGA_INSTANTIATE_OPS(double)

#undef OMEGA_INSTANTIATE_OPS

}  // namespace omega::ops
