// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "omega/metrics.hpp"
#include "omega/omega_net.hpp"
#include "omega/optim.hpp"
#include "omega/synthetic.hpp"

namespace omega::train {

struct TrainLoopConfig {
  std::int64_t epochs = 1;
  std::int64_t micro_batch_size = 2;
  std::int64_t accumulation_steps = 4;
  std::int64_t eval_interval = 0;  // 0: evaluate only after the last step
  std::int64_t max_steps = 0;      // 0: no cap beyond epochs
  double threshold = 0.5;
  std::uint64_t seed = 0;
  AdamConfig adam;

  void validate() const;
  friend bool operator==(const TrainLoopConfig&, const TrainLoopConfig&) = default;
};

template <typename T>
struct MicroBatch {
  Tensor<T> images;  // N×1×H×W
  Tensor<T> masks;   // N×L×H×W
};

template <typename T>
MicroBatch<T> to_micro_batch(const data::Batch& b) {
  return {b.images.template cast<T>(), b.masks.template cast<T>()};
}

template <typename T>
struct GradientResult {
  std::vector<Tensor<T>> grads;  // parameter order
  double loss = 0;               // sample-weighted mean of the micro-batch losses
};

/// Loss and parameter gradients for one micro-batch.
template <typename T>
GradientResult<T> compute_gradients(const OmegaNet<T>& net, const MicroBatch<T>& batch);

/// Sample-weighted mean of per-micro-batch gradients. With the mean-reduced
/// loss this equals the gradient of the concatenated batch.
template <typename T>
GradientResult<T> accumulate_gradients(const OmegaNet<T>& net, std::span<const MicroBatch<T>> batches);

/// Sigmoid of the main-path logits, evaluated without recording gradients.
Tensor<float> predict_probabilities(const OmegaNet<float>& net, const Tensor<float>& images);

struct Evaluation {
  MetricsReport metrics;
  double loss = 0;
};

Evaluation evaluate(const OmegaNet<float>& net, std::span<const data::Sample> samples,
                    double threshold, std::int64_t micro_batch_size);

struct HistoryEntry {
  std::int64_t step;  // 1-based count of optimizer steps taken
  double loss;
  std::optional<MetricsReport> metrics;
};

using History = std::vector<HistoryEntry>;

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::int64_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

struct TrainHooks {
  /// Called after each evaluation point, once that step is in the history.
  std::function<void(std::int64_t step, const OmegaNet<float>&, const AdamState<float>&)> checkpoint;
  /// Called after every optimizer step.
  std::function<void(const HistoryEntry&)> on_step;
};

std::int64_t steps_per_epoch(std::int64_t n_train, const TrainLoopConfig& cfg);
std::int64_t total_steps(std::int64_t n_train, const TrainLoopConfig& cfg);

/// Sample indices (into the training set) consumed by optimizer step `step`
/// (0-based), grouped into micro-batches. Pure function of (seed, step).
std::vector<std::vector<std::int64_t>> step_schedule(std::int64_t n_train, const TrainLoopConfig& cfg,
                                                     std::int64_t step);

/// Runs optimizer steps state.step .. total_steps−1, so a state restored from
/// a checkpoint resumes exactly where it stopped. Evaluation uses eval_samples
/// (falls back to the training samples when empty).
History train(OmegaNet<float>& net, AdamState<float>& state, std::span<const data::Sample> train_samples,
              std::span<const data::Sample> eval_samples, const TrainLoopConfig& cfg,
              const TrainHooks& hooks = {});

std::string history_csv_header(std::int64_t channels);
std::string history_csv_row(const HistoryEntry& e, std::int64_t channels);

void write_history_csv(const std::filesystem::path& path, const History& history,
                       std::int64_t channels);

}  // namespace omega::train
