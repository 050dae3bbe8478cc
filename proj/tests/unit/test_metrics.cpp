// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "omega/metrics.hpp"
#include "omega/random.hpp"
#include "omega/verify/oracles.hpp"

using namespace omega;
using namespace omega::train;

namespace {
Tensor<float> row(std::vector<float> v) {
  const auto n = static_cast<std::int64_t>(v.size());
  return Tensor<float>({1, 1, n}, std::move(v));
}
}  // namespace

TEST_CASE("metrics: half overlap gives 0.5 everywhere") {
  // prediction {0,1}, truth {1,2}: TP 1, FP 1, FN 1.
  auto r = compute_metrics(row({0.9f, 0.8f, 0.1f, 0.2f}), row({0, 1, 1, 0}), 0.5);
  const auto& m = r.channels[0];
  CHECK(m.tp == 1);
  CHECK(m.fp == 1);
  CHECK(m.fn == 1);
  CHECK(m.tn == 1);
  CHECK(m.dsc == 0.5);
  CHECK(m.ppv == 0.5);
  CHECK(m.sensitivity == 0.5);
}

TEST_CASE("metrics: perfect, disjoint and empty channels") {
  auto perfect = compute_metrics(row({1, 0, 1}), row({1, 0, 1}));
  CHECK(perfect.channels[0].dsc == 1.0);
  CHECK(perfect.channels[0].ppv == 1.0);
  CHECK(perfect.channels[0].sensitivity == 1.0);

  auto disjoint = compute_metrics(row({1, 0, 0}), row({0, 1, 0}));
  CHECK(disjoint.channels[0].dsc == 0.0);
  CHECK(disjoint.channels[0].ppv == 0.0);
  CHECK(disjoint.channels[0].sensitivity == 0.0);

  auto both_empty = compute_metrics(row({0.1f, 0.2f}), row({0, 0}));
  CHECK(both_empty.channels[0].dsc == 1.0);
  CHECK(both_empty.channels[0].ppv == 1.0);
  CHECK(both_empty.channels[0].sensitivity == 1.0);

  auto missed = compute_metrics(row({0.1f, 0.2f}), row({1, 0}));
  CHECK(missed.channels[0].dsc == 0.0);
  CHECK(missed.channels[0].ppv == 0.0);
  CHECK(missed.channels[0].sensitivity == 0.0);

  auto hallucinated = compute_metrics(row({0.9f, 0.2f}), row({0, 0}));
  CHECK(hallucinated.channels[0].dsc == 0.0);
  CHECK(hallucinated.channels[0].ppv == 0.0);
  CHECK(hallucinated.channels[0].sensitivity == 0.0);
}

TEST_CASE("metrics: threshold is inclusive") {
  CHECK(is_positive(0.5, 0.5));
  CHECK_FALSE(is_positive(0.4999, 0.5));
  auto r = compute_metrics(row({0.5f}), row({1}), 0.5);
  CHECK(r.channels[0].tp == 1);
}

TEST_CASE("metrics: per-channel results and means") {
  Tensor<float> p({2, 2, 1, 2}), y({2, 2, 1, 2});
  // channel 0 perfect, channel 1 half overlap across the batch
  const float pv[] = {1, 0, 1, 0, 1, 1, 0, 0};
  const float yv[] = {1, 0, 1, 1, 1, 1, 0, 0};
  for (int i = 0; i < 8; ++i) {
    p[i] = pv[i];
    y[i] = yv[i];
  }
  auto r = compute_metrics(p, y);
  REQUIRE(r.channels.size() == 2);
  CHECK(r.channels[0].dsc == 1.0);
  CHECK(r.channels[1].tp == 1);
  CHECK(r.channels[1].fn == 1);
  CHECK(r.channels[1].dsc == doctest::Approx(2.0 / 3));
  CHECK(r.mean_dsc == doctest::Approx((1 + 2.0 / 3) / 2));
}

TEST_CASE("metrics: accumulation across batches equals one pass") {
  Rng rng(5);
  Tensor<float> p({4, 2, 3, 3}), y({4, 2, 3, 3});
  for (std::size_t i = 0; i < p.numel(); ++i) {
    p[i] = static_cast<float>(rng.uniform());
    y[i] = rng.uniform() < 0.4 ? 1.0f : 0.0f;
  }
  MetricsAccumulator acc(2, 0.5);
  for (int n = 0; n < 4; ++n) {
    Tensor<float> pn({1, 2, 3, 3}), yn({1, 2, 3, 3});
    for (int i = 0; i < 18; ++i) {
      pn[i] = p[n * 18 + i];
      yn[i] = y[n * 18 + i];
    }
    acc.add(pn, yn);
  }
  const auto a = acc.finalize();
  const auto b = compute_metrics(p, y);
  const auto c = verify::metrics_naive(p, y, 0.5);
  for (int ch = 0; ch < 2; ++ch) {
    CHECK(a.channels[ch].tp == b.channels[ch].tp);
    CHECK(a.channels[ch].dsc == b.channels[ch].dsc);
    CHECK(c.channels[ch].tp == b.channels[ch].tp);
    CHECK(c.channels[ch].tn == b.channels[ch].tn);
    CHECK(c.channels[ch].ppv == b.channels[ch].ppv);
  }
}

TEST_CASE("metrics: input validation") {
  CHECK_THROWS_AS(MetricsAccumulator(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(MetricsAccumulator(2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(MetricsAccumulator(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(row({0.1f}), row({0.5f})), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(row({1.5f}), row({1})), std::invalid_argument);
  CHECK_THROWS_AS(compute_metrics(row({0.5f, 0.5f}), row({1})), ShapeError);
  MetricsAccumulator acc(2, 0.5);
  CHECK_THROWS_AS(acc.add(row({0.1f}), row({1})), ShapeError);
}
