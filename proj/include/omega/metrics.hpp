// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "omega/tensor.hpp"

namespace omega::train {

struct ChannelMetrics {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  double dsc = 0, ppv = 0, sensitivity = 0;
};

/// Per-channel overlap metrics over binarized predictions. A ratio whose
/// numerator and denominator are both zero is 1 when the channel has neither
/// ground-truth nor predicted positives, and 0 otherwise.
struct MetricsReport {
  std::vector<ChannelMetrics> channels;
  double mean_dsc = 0, mean_ppv = 0, mean_sensitivity = 0;
};

/// Shared binarization rule for metrics and exported masks: p ≥ threshold.
inline bool is_positive(double p, double threshold) { return p >= threshold; }

/// Accumulates pixel counts across batches; finalize() derives the ratios.
class MetricsAccumulator {
 public:
  MetricsAccumulator(std::int64_t channels, double threshold);

  /// prob and mask: N×L×H×W (or L×H×W), prob in [0, 1], mask in {0, 1}.
  void add(const Tensor<float>& prob, const Tensor<float>& mask);
  MetricsReport finalize() const;

 private:
  double threshold_;
  std::vector<ChannelMetrics> counts_;
};

MetricsReport compute_metrics(const Tensor<float>& prob, const Tensor<float>& mask,
                              double threshold = 0.5);

/// Ratios from raw counts, with the empty-denominator convention above.
ChannelMetrics finalize_counts(ChannelMetrics counts);

}  // namespace omega::train
