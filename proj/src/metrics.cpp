// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/metrics.hpp"

#include <stdexcept>
#include <string>

namespace omega::train {

namespace {

double ratio(std::int64_t num, std::int64_t den, bool both_empty) {
  if (den == 0) return both_empty ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ChannelMetrics finalize_counts(ChannelMetrics c) {
  const std::int64_t truth = c.tp + c.fn, pred = c.tp + c.fp;
  const bool both_empty = truth == 0 && pred == 0;
  c.dsc = ratio(2 * c.tp, truth + pred, both_empty);
  c.ppv = ratio(c.tp, pred, both_empty);
  c.sensitivity = ratio(c.tp, truth, both_empty);
  return c;
}

MetricsAccumulator::MetricsAccumulator(std::int64_t channels, double threshold)
    : threshold_(threshold), counts_(static_cast<std::size_t>(channels)) {
  if (!(threshold > 0 && threshold < 1)) {
    throw std::invalid_argument("metrics threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
  if (channels < 1) throw std::invalid_argument("metrics need at least one channel");
}

void MetricsAccumulator::add(const Tensor<float>& prob, const Tensor<float>& mask) {
  if (prob.shape() != mask.shape()) {
    throw ShapeError("metrics: prediction shape " + shape_str(prob.shape()) + " differs from mask " +
                     shape_str(mask.shape()));
  }
  const Shape& s = prob.shape();
  if (s.size() != 3 && s.size() != 4) throw ShapeError("metrics expect L×H×W or N×L×H×W");
  const std::int64_t n = s.size() == 4 ? s[0] : 1;
  const std::int64_t l = s[s.size() - 3];
  const std::int64_t plane = s[s.size() - 2] * s[s.size() - 1];
  if (l != static_cast<std::int64_t>(counts_.size())) {
    throw ShapeError("metrics: expected " + std::to_string(counts_.size()) + " channels, got " +
                     std::to_string(l));
  }
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t c = 0; c < l; ++c) {
      ChannelMetrics& acc = counts_[static_cast<std::size_t>(c)];
      const std::size_t base = static_cast<std::size_t>((b * l + c) * plane);
      for (std::int64_t q = 0; q < plane; ++q) {
        const float p = prob[base + q], y = mask[base + q];
        if (!(p >= 0.0f && p <= 1.0f)) throw std::invalid_argument("metrics: probability outside [0, 1]");
        if (y != 0.0f && y != 1.0f) throw std::invalid_argument("metrics: mask must be binary");
        const bool pos = is_positive(p, threshold_);
        const bool truth = y == 1.0f;
        acc.tp += pos && truth;
        acc.fp += pos && !truth;
        acc.fn += !pos && truth;
        acc.tn += !pos && !truth;
      }
    }
  }
}

MetricsReport MetricsAccumulator::finalize() const {
  MetricsReport r;
  for (const auto& c : counts_) {
    r.channels.push_back(finalize_counts(c));
    r.mean_dsc += r.channels.back().dsc;
    r.mean_ppv += r.channels.back().ppv;
    r.mean_sensitivity += r.channels.back().sensitivity;
  }
  const double k = static_cast<double>(r.channels.size());
  r.mean_dsc /= k;
  r.mean_ppv /= k;
  r.mean_sensitivity /= k;
  return r;
}

MetricsReport compute_metrics(const Tensor<float>& prob, const Tensor<float>& mask, double threshold) {
  const Shape& s = prob.shape();
  if (s.size() < 3) throw ShapeError("metrics expect L×H×W or N×L×H×W");
  MetricsAccumulator acc(s[s.size() - 3], threshold);
  acc.add(prob, mask);
  return acc.finalize();
}

}  // namespace omega::train
