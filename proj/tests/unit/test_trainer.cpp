// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "../test_util.hpp"
#include "omega/trainer.hpp"

using namespace omega;
using namespace omega::train;

namespace {

std::vector<data::Sample> samples(std::int64_t n, std::int64_t size = 16) {
  data::SyntheticSpec spec;
  spec.image_size = size;
  spec.n_samples = n;
  spec.seed = 3;
  std::vector<data::Sample> out;
  for (std::int64_t i = 0; i < n; ++i) out.push_back(data::generate(spec, i));
  return out;
}

double rel_diff(const std::vector<Tensor<double>>& a, const std::vector<Tensor<double>>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t q = 0; q < a[i].numel(); ++q) {
      num += (a[i][q] - b[i][q]) * (a[i][q] - b[i][q]);
      den += b[i][q] * b[i][q];
    }
  return std::sqrt(num / den);
}

TrainLoopConfig small_loop() {
  TrainLoopConfig c;
  c.micro_batch_size = 2;
  c.accumulation_steps = 2;
  c.epochs = 2;
  c.adam.lr = 1e-3;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("accumulation: G = 2 equals the concatenated batch") {
  const auto s = samples(4);
  OmegaNet<double> net(ModelConfig::toy(3, 2, 16, 4), 1);
  const auto big = to_micro_batch<double>(data::make_batch(s));
  const std::vector<MicroBatch<double>> parts{
      to_micro_batch<double>(data::make_batch(std::span(s).subspan(0, 2))),
      to_micro_batch<double>(data::make_batch(std::span(s).subspan(2, 2)))};
  const auto whole = compute_gradients(net, big);
  const auto acc = accumulate_gradients<double>(net, parts);
  CHECK(rel_diff(acc.grads, whole.grads) < 1e-6);
  CHECK(acc.loss == doctest::Approx(whole.loss).epsilon(1e-12));

  // Uneven micro-batches are weighted by their sample counts.
  const std::vector<MicroBatch<double>> uneven{
      to_micro_batch<double>(data::make_batch(std::span(s).subspan(0, 3))),
      to_micro_batch<double>(data::make_batch(std::span(s).subspan(3, 1)))};
  CHECK(rel_diff(accumulate_gradients<double>(net, uneven).grads, whole.grads) < 1e-6);
  CHECK_THROWS_AS(accumulate_gradients<double>(net, std::span<const MicroBatch<double>>{}), std::invalid_argument);
}

TEST_CASE("schedule: step counts and per-epoch permutations") {
  auto c = small_loop();
  CHECK(steps_per_epoch(8, c) == 2);
  CHECK(steps_per_epoch(9, c) == 3);
  CHECK(total_steps(9, c) == 6);
  c.max_steps = 4;
  CHECK(total_steps(9, c) == 4);
  c.epochs = 0;
  CHECK(total_steps(9, c) == 0);

  c = small_loop();
  const std::int64_t n = 9;
  for (std::int64_t epoch = 0; epoch < 2; ++epoch) {
    std::multiset<std::int64_t> seen;
    for (std::int64_t k = 0; k < 3; ++k) {
      const auto groups = step_schedule(n, c, epoch * 3 + k);
      for (const auto& g : groups) {
        CHECK(g.size() <= 2);
        seen.insert(g.begin(), g.end());
      }
    }
    CHECK(seen.size() == 9);
    CHECK(std::set<std::int64_t>(seen.begin(), seen.end()).size() == 9);
  }
  CHECK(step_schedule(n, c, 4) == step_schedule(n, c, 4));
  auto other = c;
  other.seed = 12;
  bool differs = false;
  for (std::int64_t k = 0; k < 3; ++k) differs = differs || step_schedule(n, c, k) != step_schedule(n, other, k);
  CHECK(differs);
}

TEST_CASE("train: loss decreases and history records evaluations") {
  const auto s = samples(4);
  OmegaNet<float> net(ModelConfig::toy(3, 2, 16, 4), 2);
  auto c = small_loop();
  c.epochs = 8;
  c.eval_interval = 3;
  auto st = AdamState<float>::zeros(net.parameters(), c.adam);
  std::vector<std::int64_t> checkpoints;
  TrainHooks hooks;
  hooks.checkpoint = [&](std::int64_t step, const OmegaNet<float>&, const AdamState<float>&) {
    checkpoints.push_back(step);
  };
  const auto h = train::train(net, st, s, {}, c, hooks);
  REQUIRE(h.size() == 8);
  CHECK(st.step == 8);
  CHECK(h.front().step == 1);
  CHECK(h.back().loss < h.front().loss);
  CHECK(checkpoints == std::vector<std::int64_t>{3, 6, 8});
  CHECK(h[2].metrics.has_value());
  CHECK_FALSE(h[3].metrics.has_value());
  CHECK(h.back().metrics.has_value());
}

TEST_CASE("train: zero epochs leave the model untouched") {
  const auto s = samples(2);
  OmegaNet<float> net(ModelConfig::toy(3, 2, 16, 4), 2);
  const auto before = net.parameters()[0].value;
  auto c = small_loop();
  c.epochs = 0;
  auto st = AdamState<float>::zeros(net.parameters(), c.adam);
  CHECK(train::train(net, st, s, {}, c).empty());
  CHECK(net.parameters()[0].value == before);
  CHECK_THROWS_AS(train::train(net, st, {}, {}, c), std::invalid_argument);
}

TEST_CASE("train: resuming reproduces an uninterrupted run bit-for-bit") {
  const auto s = samples(6);
  const auto cfg = ModelConfig::toy(3, 2, 16, 4);
  auto c = small_loop();
  c.epochs = 3;

  OmegaNet<float> straight(cfg, 5);
  auto st1 = AdamState<float>::zeros(straight.parameters(), c.adam);
  const auto h1 = train::train(straight, st1, s, {}, c);

  OmegaNet<float> first(cfg, 5);
  auto st2 = AdamState<float>::zeros(first.parameters(), c.adam);
  auto partial = c;
  partial.max_steps = 2;
  const auto ha = train::train(first, st2, s, {}, partial);
  CHECK(st2.step == 2);
  // Restore into a fresh object, as a checkpoint load would.
  OmegaNet<float> resumed(cfg, first.parameters());
  auto st3 = st2;
  const auto hb = train::train(resumed, st3, s, {}, c);
  REQUIRE(hb.size() == h1.size() - 2);
  CHECK(hb.front().step == 3);
  CHECK(hb.front().loss == h1[2].loss);
  for (std::size_t i = 0; i < straight.parameters().size(); ++i) {
    CHECK(straight.parameters()[i].value == resumed.parameters()[i].value);
  }
}

TEST_CASE("train: non-finite loss raises divergence with the step") {
  const auto s = samples(2);
  OmegaNet<float> net(ModelConfig::toy(3, 2, 16, 4), 2);
  net.parameters().at("head_main.bias")[0] = std::numeric_limits<float>::quiet_NaN();
  auto c = small_loop();
  auto st = AdamState<float>::zeros(net.parameters(), c.adam);
  try {
    train::train(net, st, s, {}, c);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.step() == 1);
  }
  CHECK(st.step == 0);
}

TEST_CASE("evaluate and predict: ranges and consistency") {
  const auto s = samples(3);
  OmegaNet<float> net(ModelConfig::toy(3, 2, 16, 4), 2);
  const auto ev = evaluate(net, s, 0.5, 2);
  CHECK(ev.loss > 0);
  for (const auto& m : ev.metrics.channels) {
    CHECK(m.dsc >= 0.0);
    CHECK(m.dsc <= 1.0);
    CHECK(m.tp + m.fp + m.fn + m.tn == 3 * 16 * 16);
  }
  const auto again = evaluate(net, s, 0.5, 1);
  CHECK(again.metrics.channels[1].tp == ev.metrics.channels[1].tp);
  CHECK(again.loss == doctest::Approx(ev.loss).epsilon(1e-5));

  const auto batch = data::make_batch(s);
  const auto p = predict_probabilities(net, batch.images);
  CHECK(p.shape() == Shape{3, 2, 16, 16});
  for (float v : p.data()) CHECK((v >= 0.0f && v <= 1.0f));
  const auto direct = compute_metrics(p, batch.masks, 0.5);
  CHECK(direct.channels[0].tp == ev.metrics.channels[0].tp);
  CHECK(direct.channels[0].fp == ev.metrics.channels[0].fp);
}

TEST_CASE("history CSV: header, blank metric cells, row format") {
  History h{{1, 0.5, std::nullopt}, {2, 0.25, MetricsReport{}}};
  h[1].metrics->channels = {{1, 0, 0, 3, 1.0, 1.0, 1.0}, {0, 1, 1, 2, 0.0, 0.0, 0.0}};
  CHECK(history_csv_header(2) == "step,loss,dsc0,ppv0,sens0,dsc1,ppv1,sens1");
  CHECK(history_csv_row(h[0], 2) == "1,0.5,,,,,,");
  CHECK(history_csv_row(h[1], 2) == "2,0.25,1,1,1,0,0,0");
  const auto dir = testing::scratch_dir("history_csv");
  write_history_csv(dir / "h.csv", h, 2);
  std::ifstream f(dir / "h.csv");
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == "step,loss,dsc0,ppv0,sens0,dsc1,ppv1,sens1\n1,0.5,,,,,,\n2,0.25,1,1,1,0,0,0\n");
}

TEST_CASE("train config: validation") {
  for (auto mutate : {+[](TrainLoopConfig& c) { c.epochs = -1; }, +[](TrainLoopConfig& c) { c.micro_batch_size = 0; },
                      +[](TrainLoopConfig& c) { c.accumulation_steps = 0; },
                      +[](TrainLoopConfig& c) { c.threshold = 1.0; }, +[](TrainLoopConfig& c) { c.max_steps = -2; },
                      +[](TrainLoopConfig& c) { c.adam.lr = -1; }}) {
    TrainLoopConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
}
