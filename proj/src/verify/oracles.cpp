// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/verify/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace omega::verify {

T64 conv2d_naive(const T64& x, const T64& w, const T64& b, int stride, int pad, int dilation) {
  const auto n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const auto o = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const auto ho = (h + 2 * pad - dilation * (kh - 1) - 1) / stride + 1;
  const auto wo = (wd + 2 * pad - dilation * (kw - 1) - 1) / stride + 1;
  T64 out(Shape{n, o, ho, wo});
  for (std::int64_t bi = 0; bi < n; ++bi)
    for (std::int64_t oc = 0; oc < o; ++oc)
      for (std::int64_t y = 0; y < ho; ++y)
        for (std::int64_t xx = 0; xx < wo; ++xx) {
          double acc = b[oc];
          for (std::int64_t ic = 0; ic < c; ++ic)
            for (std::int64_t i = 0; i < kh; ++i)
              for (std::int64_t j = 0; j < kw; ++j) {
                const std::int64_t iy = y * stride - pad + i * dilation;
                const std::int64_t ix = xx * stride - pad + j * dilation;
                if (iy < 0 || iy >= h || ix < 0 || ix >= wd) continue;
                acc += w.at(oc, ic, i, j) * x.at(bi, ic, iy, ix);
              }
          out.at(bi, oc, y, xx) = acc;
        }
  return out;
}

T64 transposed_conv2d_naive(const T64& x, const T64& w, const T64& b, int stride) {
  const auto n = x.dim(0), ci = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const auto co = w.dim(1), kh = w.dim(2), kw = w.dim(3);
  const auto ho = (h - 1) * stride + kh, wo = (wd - 1) * stride + kw;
  T64 out(Shape{n, co, ho, wo});
  for (std::int64_t bi = 0; bi < n; ++bi)
    for (std::int64_t oc = 0; oc < co; ++oc)
      for (std::int64_t y = 0; y < ho; ++y)
        for (std::int64_t xx = 0; xx < wo; ++xx) out.at(bi, oc, y, xx) = b[oc];
  for (std::int64_t bi = 0; bi < n; ++bi)
    for (std::int64_t ic = 0; ic < ci; ++ic)
      for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t xx = 0; xx < wd; ++xx)
          for (std::int64_t oc = 0; oc < co; ++oc)
            for (std::int64_t i = 0; i < kh; ++i)
              for (std::int64_t j = 0; j < kw; ++j)
                out.at(bi, oc, y * stride + i, xx * stride + j) += x.at(bi, ic, y, xx) * w.at(ic, oc, i, j);
  return out;
}

T64 maxpool2d_naive(const T64& x, int window) {
  const auto n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  T64 out(Shape{n, c, h / window, w / window});
  for (std::int64_t bi = 0; bi < n; ++bi)
    for (std::int64_t ch = 0; ch < c; ++ch)
      for (std::int64_t y = 0; y < h / window; ++y)
        for (std::int64_t xx = 0; xx < w / window; ++xx) {
          double best = -INFINITY;
          for (int i = 0; i < window; ++i)
            for (int j = 0; j < window; ++j) best = std::max(best, x.at(bi, ch, y * window + i, xx * window + j));
          out.at(bi, ch, y, xx) = best;
        }
  return out;
}

T64 softmax_rows_naive(const T64& x) {
  const auto cols = x.shape().back();
  const auto rows = static_cast<std::int64_t>(x.numel()) / cols;
  T64 out(x.shape());
  for (std::int64_t r = 0; r < rows; ++r) {
    double denom = 0;
    for (std::int64_t j = 0; j < cols; ++j) denom += std::exp(x[r * cols + j]);
    for (std::int64_t j = 0; j < cols; ++j) out[r * cols + j] = std::exp(x[r * cols + j]) / denom;
  }
  return out;
}

T64 matmul_naive(const T64& a, const T64& b) {
  const auto r = a.dim(0), s = a.dim(1), t = b.dim(1);
  T64 out(Shape{r, t});
  for (std::int64_t i = 0; i < r; ++i)
    for (std::int64_t j = 0; j < t; ++j) {
      double acc = 0;
      for (std::int64_t k = 0; k < s; ++k) acc += a[i * s + k] * b[k * t + j];
      out[i * t + j] = acc;
    }
  return out;
}

T64 adaptive_avg_pool_naive(const T64& x, std::int64_t k) {
  const auto n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const auto positions = h * w;
  T64 out(Shape{n, c, k});
  for (std::int64_t bi = 0; bi < n; ++bi)
    for (std::int64_t ch = 0; ch < c; ++ch)
      for (std::int64_t bin = 0; bin < k; ++bin) {
        const auto lo = bin * positions / k, hi = (bin + 1) * positions / k;
        double acc = 0;
        for (auto q = lo; q < hi; ++q) acc += x.at(bi, ch, q / w, q % w);
        out[(bi * c + ch) * k + bin] = acc / static_cast<double>(hi - lo);
      }
  return out;
}

T64 relu_naive(const T64& x) {
  T64 out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = std::max(0.0, x[i]);
  return out;
}

T64 add_naive(const T64& a, const T64& b) {
  T64 out(a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a[i] + b[i];
  return out;
}

T64 dspa_naive(const T64& m, const T64& dilated_w, const T64& dilated_b, std::int64_t k, T64* attention) {
  const auto n = m.dim(0), c = m.dim(1), h = m.dim(2), w = m.dim(3), np = h * w;
  const T64 dense = adaptive_avg_pool_naive(relu_naive(conv2d_naive(m, dilated_w, dilated_b, 1, 2, 2)), k);
  T64 out(m.shape());
  if (attention) *attention = T64(Shape{n, np, k});
  for (std::int64_t bi = 0; bi < n; ++bi) {
    auto D = [&](std::int64_t ch, std::int64_t i) { return dense[(bi * c + ch) * k + i]; };
    auto M = [&](std::int64_t ch, std::int64_t j) { return m.at(bi, ch, j / w, j % w); };
    for (std::int64_t j = 0; j < np; ++j) {
      std::vector<double> e(static_cast<std::size_t>(k));
      double denom = 0;
      for (std::int64_t i = 0; i < k; ++i) {
        double dot = 0;
        for (std::int64_t ch = 0; ch < c; ++ch) dot += D(ch, i) * M(ch, j);
        e[i] = std::exp(dot);
        denom += e[i];
      }
      for (std::int64_t ch = 0; ch < c; ++ch) {
        double acc = 0;
        for (std::int64_t i = 0; i < k; ++i) acc += (e[i] / denom) * D(ch, i);
        out.at(bi, ch, j / w, j % w) = acc + M(ch, j);
      }
      if (attention)
        for (std::int64_t i = 0; i < k; ++i) (*attention)[(bi * np + j) * k + i] = e[i] / denom;
    }
  }
  return out;
}

T64 channel_attention_naive(const T64& m, T64* attention) {
  const auto n = m.dim(0), c = m.dim(1), h = m.dim(2), w = m.dim(3), np = h * w;
  T64 out(m.shape());
  if (attention) *attention = T64(Shape{n, c, c});
  for (std::int64_t bi = 0; bi < n; ++bi) {
    auto M = [&](std::int64_t ch, std::int64_t q) { return m.at(bi, ch, q / w, q % w); };
    for (std::int64_t j = 0; j < c; ++j) {
      std::vector<double> e(static_cast<std::size_t>(c));
      double denom = 0;
      for (std::int64_t i = 0; i < c; ++i) {
        double dot = 0;
        for (std::int64_t q = 0; q < np; ++q) dot += M(i, q) * M(j, q);
        e[i] = std::exp(dot);
        denom += e[i];
      }
      for (std::int64_t q = 0; q < np; ++q) {
        double acc = 0;
        for (std::int64_t i = 0; i < c; ++i) acc += (e[i] / denom) * M(i, q);
        out.at(bi, j, q / w, q % w) = acc + M(j, q);
      }
      if (attention)
        for (std::int64_t i = 0; i < c; ++i) (*attention)[(bi * c + j) * c + i] = e[i] / denom;
    }
  }
  return out;
}

T64 cascade_msc_naive(const T64& x, const MscWeights& p) {
  const T64 x1 = relu_naive(conv2d_naive(x, p.w5, p.b5, 1, 2, 1));
  const T64 x2 = relu_naive(conv2d_naive(add_naive(x, x1), p.w3, p.b3, 1, 1, 1));
  const T64 x3 = relu_naive(conv2d_naive(add_naive(x, x2), p.w1, p.b1, 1, 0, 1));
  const auto n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  T64 cat(Shape{n, 4 * c, h, w});
  const T64* parts[4] = {&x, &x1, &x2, &x3};
  for (std::int64_t bi = 0; bi < n; ++bi)
    for (int part = 0; part < 4; ++part)
      for (std::int64_t ch = 0; ch < c; ++ch)
        for (std::int64_t y = 0; y < h; ++y)
          for (std::int64_t xx = 0; xx < w; ++xx) cat.at(bi, part * c + ch, y, xx) = parts[part]->at(bi, ch, y, xx);
  return conv2d_naive(cat, p.wf, p.bf, 1, 0, 1);
}

double bce_naive(const T64& logits, const T64& mask) {
  double acc = 0;
  for (std::size_t i = 0; i < logits.numel(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-logits[i]));
    acc += -(mask[i] * std::log(p) + (1.0 - mask[i]) * std::log(1.0 - p));
  }
  return acc / static_cast<double>(logits.numel());
}

train::MetricsReport metrics_naive(const Tensor<float>& prob, const Tensor<float>& mask, double threshold) {
  const Shape& s = prob.shape();
  const std::int64_t n = s.size() == 4 ? s[0] : 1;
  const std::int64_t l = s[s.size() - 3], h = s[s.size() - 2], w = s[s.size() - 1];
  train::MetricsReport r;
  for (std::int64_t ch = 0; ch < l; ++ch) {
    train::ChannelMetrics m;
    for (std::int64_t bi = 0; bi < n; ++bi)
      for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x) {
          const std::size_t q = static_cast<std::size_t>(((bi * l + ch) * h + y) * w + x);
          const bool p = prob[q] >= threshold;
          const bool t = mask[q] > 0.5f;
          if (p && t) ++m.tp;
          else if (p) ++m.fp;
          else if (t) ++m.fn;
          else ++m.tn;
        }
    const bool none = m.tp + m.fp + m.fn == 0;
    const auto truth = m.tp + m.fn, pred = m.tp + m.fp;
    m.dsc = (truth + pred) == 0 ? (none ? 1.0 : 0.0) : 2.0 * m.tp / static_cast<double>(truth + pred);
    m.ppv = pred == 0 ? (none ? 1.0 : 0.0) : m.tp / static_cast<double>(pred);
    m.sensitivity = truth == 0 ? (none ? 1.0 : 0.0) : m.tp / static_cast<double>(truth);
    r.channels.push_back(m);
    r.mean_dsc += m.dsc / static_cast<double>(l);
    r.mean_ppv += m.ppv / static_cast<double>(l);
    r.mean_sensitivity += m.sensitivity / static_cast<double>(l);
  }
  return r;
}

}  // namespace omega::verify
