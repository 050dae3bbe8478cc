// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "omega/random.hpp"

namespace omega::train {

void TrainLoopConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("train config: " + m); };
  if (epochs < 0) fail("epochs must be >= 0");
  if (micro_batch_size < 1) fail("micro_batch_size must be >= 1");
  if (accumulation_steps < 1) fail("accumulation_steps must be >= 1");
  if (eval_interval < 0) fail("eval_interval must be >= 0");
  if (max_steps < 0) fail("max_steps must be >= 0");
  if (!(threshold > 0 && threshold < 1)) fail("threshold must lie in (0, 1)");
  adam.validate();
}

template <typename T>
GradientResult<T> compute_gradients(const OmegaNet<T>& net, const MicroBatch<T>& batch) {
  Tape<T> tape;
  const auto binding = net.bind(tape, true);
  const auto out = net.forward(binding, tape.leaf(batch.images, false));
  const auto& cfg = net.config();
  const auto loss = dual_loss(out, batch.masks, cfg.lambda_s, cfg.lambda_a);
  tape.backward(loss);
  return {binding.gradients(tape), static_cast<double>(loss->value[0])};
}

template <typename T>
GradientResult<T> accumulate_gradients(const OmegaNet<T>& net, std::span<const MicroBatch<T>> batches) {
  if (batches.empty()) throw std::invalid_argument("accumulate_gradients: no micro-batches");
  std::int64_t total = 0;
  for (const auto& b : batches) total += b.images.dim(0);
  GradientResult<T> acc;
  for (const auto& b : batches) {
    auto r = compute_gradients(net, b);
    const double w = static_cast<double>(b.images.dim(0)) / static_cast<double>(total);
    const T wt = static_cast<T>(w);
    if (acc.grads.empty()) {
      acc.grads = std::move(r.grads);
      for (auto& g : acc.grads)
        for (auto& v : g.data()) v *= wt;
    } else {
      for (std::size_t i = 0; i < acc.grads.size(); ++i) {
        T* dst = acc.grads[i].ptr();
        const T* src = r.grads[i].ptr();
        for (std::size_t q = 0; q < acc.grads[i].numel(); ++q) dst[q] += wt * src[q];
      }
    }
    acc.loss += w * r.loss;
  }
  return acc;
}

Tensor<float> predict_probabilities(const OmegaNet<float>& net, const Tensor<float>& images) {
  Tape<float> tape;
  const auto out = net.forward(tape, images, false);
  return ops::sigmoid_tensor(out.main_logits->value);
}

Evaluation evaluate(const OmegaNet<float>& net, std::span<const data::Sample> samples, double threshold,
                    std::int64_t micro_batch_size) {
  if (samples.empty()) throw std::invalid_argument("evaluate: no samples");
  const auto& cfg = net.config();
  MetricsAccumulator acc(cfg.out_channels, threshold);
  Evaluation ev;
  for (std::size_t i = 0; i < samples.size(); i += static_cast<std::size_t>(micro_batch_size)) {
    const std::size_t n = std::min(samples.size() - i, static_cast<std::size_t>(micro_batch_size));
    const auto batch = data::make_batch(samples.subspan(i, n));
    Tape<float> tape;
    const auto out = net.forward(tape, batch.images, false);
    const auto loss = dual_loss(out, batch.masks, cfg.lambda_s, cfg.lambda_a);
    ev.loss += static_cast<double>(loss->value[0]) * static_cast<double>(n);
    acc.add(ops::sigmoid_tensor(out.main_logits->value), batch.masks);
  }
  ev.loss /= static_cast<double>(samples.size());
  ev.metrics = acc.finalize();
  return ev;
}

std::int64_t steps_per_epoch(std::int64_t n_train, const TrainLoopConfig& cfg) {
  const std::int64_t per_step = cfg.micro_batch_size * cfg.accumulation_steps;
  return (n_train + per_step - 1) / per_step;
}

std::int64_t total_steps(std::int64_t n_train, const TrainLoopConfig& cfg) {
  std::int64_t total = cfg.epochs * steps_per_epoch(n_train, cfg);
  if (cfg.max_steps > 0) total = std::min(total, cfg.max_steps);
  return total;
}

std::vector<std::vector<std::int64_t>> step_schedule(std::int64_t n_train, const TrainLoopConfig& cfg,
                                                     std::int64_t step) {
  const std::int64_t spe = steps_per_epoch(n_train, cfg);
  const std::int64_t epoch = step / spe, pos = step % spe;
  std::vector<std::int64_t> order(static_cast<std::size_t>(n_train));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(hash_combine(cfg.seed, static_cast<std::uint64_t>(epoch)));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  const std::int64_t per_step = cfg.micro_batch_size * cfg.accumulation_steps;
  const std::int64_t begin = pos * per_step, end = std::min(n_train, begin + per_step);
  std::vector<std::vector<std::int64_t>> groups;
  for (std::int64_t i = begin; i < end; i += cfg.micro_batch_size) {
    const std::int64_t stop = std::min(end, i + cfg.micro_batch_size);
    groups.emplace_back(order.begin() + i, order.begin() + stop);
  }
  return groups;
}

History train(OmegaNet<float>& net, AdamState<float>& state, std::span<const data::Sample> train_samples,
              std::span<const data::Sample> eval_samples, const TrainLoopConfig& cfg,
              const TrainHooks& hooks) {
  cfg.validate();
  History history;
  const auto n_train = static_cast<std::int64_t>(train_samples.size());
  if (n_train == 0) throw std::invalid_argument("train: empty training set");
  const auto eval_set = eval_samples.empty() ? train_samples : eval_samples;
  const std::int64_t total = total_steps(n_train, cfg);
  for (std::int64_t step = state.step; step < total; ++step) {
    std::vector<MicroBatch<float>> micro;
    for (const auto& group : step_schedule(n_train, cfg, step)) {
      std::vector<data::Sample> picked;
      for (auto i : group) picked.push_back(train_samples[static_cast<std::size_t>(i)]);
      micro.push_back(to_micro_batch<float>(data::make_batch(picked)));
    }
    auto grads = accumulate_gradients<float>(net, micro);
    if (!std::isfinite(grads.loss)) {
      throw DivergenceError(step + 1, "loss diverged (non-finite) at step " + std::to_string(step + 1));
    }
    try {
      adam_step(net.parameters(), grads.grads, state);
    } catch (const NonFiniteGradient& e) {
      throw DivergenceError(step + 1, e.what());
    }
    HistoryEntry entry{step + 1, grads.loss, std::nullopt};
    const bool last = step + 1 == total;
    const bool eval_point = last || (cfg.eval_interval > 0 && (step + 1) % cfg.eval_interval == 0);
    if (eval_point) entry.metrics = evaluate(net, eval_set, cfg.threshold, cfg.micro_batch_size).metrics;
    if (hooks.on_step) hooks.on_step(entry);
    history.push_back(std::move(entry));
    if (eval_point && hooks.checkpoint) hooks.checkpoint(step + 1, net, state);
  }
  return history;
}

std::string history_csv_header(std::int64_t channels) {
  std::string h = "step,loss";
  for (std::int64_t c = 0; c < channels; ++c) {
    const auto n = std::to_string(c);
    h += ",dsc" + n + ",ppv" + n + ",sens" + n;
  }
  return h;
}

std::string history_csv_row(const HistoryEntry& e, std::int64_t channels) {
  std::ostringstream f;
  f.precision(9);
  f << e.step << ',' << e.loss;
  for (std::int64_t c = 0; c < channels; ++c) {
    if (e.metrics) {
      const auto& m = e.metrics->channels[static_cast<std::size_t>(c)];
      f << ',' << m.dsc << ',' << m.ppv << ',' << m.sensitivity;
    } else {
      f << ",,,";
    }
  }
  return f.str();
}

void write_history_csv(const std::filesystem::path& path, const History& history, std::int64_t channels) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << history_csv_header(channels) << '\n';
  for (const auto& e : history) f << history_csv_row(e, channels) << '\n';
}

template GradientResult<float> compute_gradients<float>(const OmegaNet<float>&, const MicroBatch<float>&);
template GradientResult<double> compute_gradients<double>(const OmegaNet<double>&, const MicroBatch<double>&);
template GradientResult<float> accumulate_gradients<float>(const OmegaNet<float>&,
                                                           std::span<const MicroBatch<float>>);
template GradientResult<double> accumulate_gradients<double>(const OmegaNet<double>&,
                                                             std::span<const MicroBatch<double>>);

}  // namespace omega::train
