// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <limits>

#include "omega/optim.hpp"

using namespace omega;
using namespace omega::train;

namespace {
ParameterSet<double> one(std::vector<double> v) {
  ParameterSet<double> p;
  const auto n = static_cast<std::int64_t>(v.size());
  p.add("w", Tensor<double>({n}, std::move(v)));
  return p;
}
}  // namespace

TEST_CASE("adam: defaults") {
  AdamConfig c;
  CHECK(c.lr == 1e-4);
  CHECK(c.beta1 == 0.9);
  CHECK(c.beta2 == 0.999);
  CHECK(c.weight_decay == 0.00015);
  CHECK_NOTHROW(c.validate());
  for (auto mutate : {+[](AdamConfig& a) { a.lr = 0; }, +[](AdamConfig& a) { a.beta1 = 1; },
                      +[](AdamConfig& a) { a.beta2 = -0.1; }, +[](AdamConfig& a) { a.eps = 0; },
                      +[](AdamConfig& a) { a.weight_decay = -1; }}) {
    AdamConfig bad;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}

TEST_CASE("adam: first step moves each weight by lr against the gradient sign") {
  auto p = one({1.0, -2.0, 0.5});
  AdamConfig c;
  c.lr = 1e-3;
  c.weight_decay = 0;
  auto st = AdamState<double>::zeros(p, c);
  adam_step(p, {Tensor<double>({3}, std::vector<double>{0.3, -7.0, 1e-3})}, st);
  CHECK(st.step == 1);
  const auto& w = p.at("w");
  CHECK(w[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
  CHECK(w[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-6));
  CHECK(w[2] == doctest::Approx(0.5 - 1e-3).epsilon(1e-4));
}

TEST_CASE("adam: weight decay is folded into the gradient") {
  auto p = one({2.0});
  AdamConfig c;
  c.lr = 0.1;
  c.weight_decay = 0.5;
  auto st = AdamState<double>::zeros(p, c);
  adam_step(p, {Tensor<double>({1}, 0.0)}, st);
  // g = 0 + 0.5·2 = 1 → m̂ = 1, v̂ = 1 → step of lr.
  CHECK(p.at("w")[0] == doctest::Approx(2.0 - 0.1 / (1 + 1e-8)));
  CHECK(st.m[0][0] == doctest::Approx(0.1));
  CHECK(st.v[0][0] == doctest::Approx(0.001));
}

TEST_CASE("adam: minimizes w^2") {
  auto p = one({3.0});
  AdamConfig c;
  c.lr = 0.05;
  c.weight_decay = 0;
  auto st = AdamState<double>::zeros(p, c);
  double prev = 9.0;
  for (int i = 0; i < 400; ++i) {
    const double w = p.at("w")[0];
    adam_step(p, {Tensor<double>({1}, 2 * w)}, st);
    const double f = p.at("w")[0] * p.at("w")[0];
    // Far from the minimum every step descends.
    if (i < 30) CHECK(f < prev);
    prev = f;
  }
  CHECK(std::abs(p.at("w")[0]) < 0.05);
}

TEST_CASE("adam: non-finite gradients are rejected before any mutation") {
  ParameterSet<double> p;
  p.add("a", Tensor<double>({2}, 1.0));
  p.add("b", Tensor<double>({2}, 1.0));
  AdamConfig c;
  auto st = AdamState<double>::zeros(p, c);
  std::vector<Tensor<double>> g{Tensor<double>({2}, 0.5), Tensor<double>({2}, 0.5)};
  g[1][1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(adam_step(p, g, st), NonFiniteGradient);
  CHECK(p.at("a") == Tensor<double>({2}, 1.0));
  CHECK(st.step == 0);
  CHECK(st.m[0] == Tensor<double>({2}));
  g[1][1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(adam_step(p, g, st), NonFiniteGradient);

  CHECK_THROWS_AS(adam_step(p, {Tensor<double>({2})}, st), std::invalid_argument);
  CHECK_THROWS_AS(adam_step(p, {Tensor<double>({2}), Tensor<double>({3})}, st), ShapeError);
}
