// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "../test_util.hpp"
#include "omega/blocks.hpp"
#include "omega/verify/gradcheck.hpp"
#include "omega/verify/oracles.hpp"

using namespace omega;
using omega::testing::max_abs_diff;
using omega::testing::random_tensor;

namespace {

struct Msc {
  verify::MscWeights w;
  blocks::MscParams<double> bind(Tape<double>& t) const {
    return {{t.leaf(w.w5), t.leaf(w.b5), {1, 2, 1}},
            {t.leaf(w.w3), t.leaf(w.b3), {1, 1, 1}},
            {t.leaf(w.w1), t.leaf(w.b1), {1, 0, 1}},
            {t.leaf(w.wf), t.leaf(w.bf), {1, 0, 1}}};
  }
};

Msc zero_msc(std::int64_t c) {
  return {{Tensor<double>({c, c, 5, 5}), Tensor<double>({c}), Tensor<double>({c, c, 3, 3}), Tensor<double>({c}),
           Tensor<double>({c, c, 1, 1}), Tensor<double>({c}), Tensor<double>({c, 4 * c, 1, 1}), Tensor<double>({c})}};
}

blocks::DspaParams<double> dspa_params(Tape<double>& t, const Tensor<double>& w, const Tensor<double>& b,
                                       std::int64_t k) {
  return {{t.leaf(w), t.leaf(b), {1, 2, 2}}, k};
}

}  // namespace

TEST_CASE("conv_block: zero weights, shape, and composed oracle") {
  Tape<double> t;
  blocks::ConvBlockParams<double> zero{{t.leaf(Tensor<double>({4, 1, 3, 3})), t.leaf(Tensor<double>({4})), {1, 1, 1}},
                                       {t.leaf(Tensor<double>({4, 4, 3, 3})), t.leaf(Tensor<double>({4})), {1, 1, 1}}};
  auto y = blocks::conv_block(t.leaf(random_tensor({1, 1, 8, 8}, 1)), zero);
  CHECK(y->value == Tensor<double>({1, 4, 8, 8}));

  auto x = random_tensor({1, 2, 5, 5}, 2);
  auto w1 = random_tensor({3, 2, 3, 3}, 3), b1 = random_tensor({3}, 4);
  auto w2 = random_tensor({3, 3, 3, 3}, 5), b2 = random_tensor({3}, 6);
  blocks::ConvBlockParams<double> p{{t.leaf(w1), t.leaf(b1), {1, 1, 1}}, {t.leaf(w2), t.leaf(b2), {1, 1, 1}}};
  auto ref = verify::relu_naive(
      verify::conv2d_naive(verify::relu_naive(verify::conv2d_naive(x, w1, b1, 1, 1, 1)), w2, b2, 1, 1, 1));
  CHECK(max_abs_diff(blocks::conv_block(t.leaf(x), p)->value, ref) < 1e-12);
  CHECK_THROWS_AS(blocks::conv_block(t.leaf(random_tensor({1, 3, 5, 5}, 7)), p), ShapeError);
}

TEST_CASE("cascade_msc: zero weights give zero, shapes are preserved") {
  Tape<double> t;
  auto y = blocks::cascade_msc(t.leaf(random_tensor({2, 4, 6, 6}, 1)), zero_msc(4).bind(t));
  CHECK(y->value == Tensor<double>({2, 4, 6, 6}));
  Msc r = zero_msc(16);
  r.w.w5 = random_tensor({16, 16, 5, 5}, 2, -0.1, 0.1);
  r.w.wf = random_tensor({16, 64, 1, 1}, 3);
  auto rf = r.bind(t);
  CHECK(blocks::cascade_msc(t.leaf(random_tensor({2, 16, 32, 32}, 4)), rf)->value.shape() == Shape{2, 16, 32, 32});
}

TEST_CASE("cascade_msc: pass-through fuse reproduces the input") {
  const std::int64_t c = 3;
  Msc p = zero_msc(c);
  for (std::int64_t i = 0; i < c; ++i) p.w.wf[i * 4 * c + i] = 1.0;
  Tape<double> t;
  auto x = random_tensor({1, c, 5, 7}, 9);
  CHECK(max_abs_diff(blocks::cascade_msc(t.leaf(x), p.bind(t))->value, x) < 1e-6);
  CHECK_THROWS_AS(blocks::cascade_msc(t.leaf(random_tensor({1, c + 1, 5, 7}, 9)), p.bind(t)), ShapeError);
}

TEST_CASE("cascade_msc: matches the cascade oracle") {
  const std::int64_t c = 2;
  Msc p{{random_tensor({c, c, 5, 5}, 1), random_tensor({c}, 2), random_tensor({c, c, 3, 3}, 3), random_tensor({c}, 4),
         random_tensor({c, c, 1, 1}, 5), random_tensor({c}, 6), random_tensor({c, 4 * c, 1, 1}, 7),
         random_tensor({c}, 8)}};
  Tape<double> t;
  auto x = random_tensor({2, c, 6, 5}, 9);
  CHECK(max_abs_diff(blocks::cascade_msc(t.leaf(x), p.bind(t))->value, verify::cascade_msc_naive(x, p.w)) < 1e-10);
}

TEST_CASE("dspa: constant input gives uniform attention and O = d + M") {
  Tape<double> t;
  const std::int64_t c = 2, k = 4;
  Tensor<double> m({1, c, 4, 4});
  // Constant per channel makes every pooled column the same vector d.
  for (std::int64_t i = 0; i < 16; ++i) {
    m[i] = 0.3;
    m[16 + i] = -0.2;
  }
  // A 1×1-equivalent dilated kernel (center tap only) keeps the dense
  // columns constant despite zero padding.
  Tensor<double> w({c, c, 3, 3});
  w[0 * 18 + 0 * 9 + 4] = 1.0;
  w[1 * 18 + 1 * 9 + 4] = -2.0;
  Tensor<double> b({c}, 0.1);
  blocks::AttentionTrace<double> tr;
  auto o = blocks::dspa(t.leaf(m), dspa_params(t, w, b, k), &tr);
  CHECK(tr.attention.shape() == Shape{1, 16, k});
  for (double a : tr.attention.data()) CHECK(a == doctest::Approx(1.0 / k).epsilon(1e-12));
  const double d0 = 0.3 + 0.1, d1 = std::max(0.0, -2.0 * -0.2 + 0.1);
  for (std::int64_t i = 0; i < k; ++i) {
    CHECK(tr.dense[i] == doctest::Approx(d0));
    CHECK(tr.dense[k + i] == doctest::Approx(d1));
  }
  for (std::int64_t i = 0; i < 16; ++i) {
    CHECK(o->value[i] == doctest::Approx(d0 + 0.3));
    CHECK(o->value[16 + i] == doctest::Approx(d1 - 0.2));
  }
}

TEST_CASE("dspa: K = 10 on 1x32x16x16 keeps the shape and yields 256x10 attention") {
  Tape<double> t;
  blocks::AttentionTrace<double> tr;
  auto o = blocks::dspa(t.leaf(random_tensor({1, 32, 16, 16}, 1, -0.1, 0.1)),
                        dspa_params(t, random_tensor({32, 32, 3, 3}, 2, -0.05, 0.05), Tensor<double>({32}), 10), &tr);
  CHECK(o->value.shape() == Shape{1, 32, 16, 16});
  CHECK(tr.attention.shape() == Shape{1, 256, 10});
  CHECK(tr.dense.shape() == Shape{1, 32, 10});
}

TEST_CASE("dspa: loop oracle, residual and row sums") {
  Tape<double> t;
  auto m = random_tensor({1, 3, 4, 4}, 3);
  auto w = random_tensor({3, 3, 3, 3}, 4, -0.5, 0.5);
  auto b = random_tensor({3}, 5, 0, 0.1);
  blocks::AttentionTrace<double> tr;
  Tensor<double> attn_ref;
  auto o = blocks::dspa(t.leaf(m), dspa_params(t, w, b, 2), &tr);
  auto ref = verify::dspa_naive(m, w, b, 2, &attn_ref);
  CHECK(max_abs_diff(o->value, ref) < 1e-10);
  CHECK(max_abs_diff(tr.attention, attn_ref) < 1e-10);
  for (std::int64_t j = 0; j < 16; ++j) CHECK(std::abs(tr.attention[2 * j] + tr.attention[2 * j + 1] - 1) < 1e-6);
  // O − M is exactly the attention-weighted sum of dense columns.
  for (std::int64_t c = 0; c < 3; ++c)
    for (std::int64_t j = 0; j < 16; ++j) {
      double s = 0;
      for (std::int64_t i = 0; i < 2; ++i) s += tr.dense[c * 2 + i] * tr.attention[j * 2 + i];
      CHECK(std::abs(o->value[c * 16 + j] - m[c * 16 + j] - s) < 1e-12);
    }
}

TEST_CASE("dspa: too few positions for K is rejected") {
  Tape<double> t;
  CHECK_THROWS_WITH(blocks::dspa(t.leaf(Tensor<double>({1, 2, 2, 2})),
                                 dspa_params(t, Tensor<double>({2, 2, 3, 3}), Tensor<double>({2}), 5)),
                    doctest::Contains("K"));
}

TEST_CASE("channel attention: single channel and identical channels") {
  Tape<double> t;
  auto m = random_tensor({1, 1, 3, 3}, 1);
  blocks::AttentionTrace<double> tr;
  auto o = blocks::channel_attention(t.leaf(m), &tr);
  CHECK(tr.attention.vec() == std::vector<double>{1.0});
  for (std::size_t i = 0; i < m.numel(); ++i) CHECK(o->value[i] == doctest::Approx(2.0 * m[i]));

  Tensor<double> two({1, 2, 2, 2});
  auto ch = random_tensor({4}, 2);
  for (int i = 0; i < 4; ++i) two[i] = two[4 + i] = ch[i];
  auto o2 = blocks::channel_attention(t.leaf(two), &tr);
  for (double a : tr.attention.data()) CHECK(a == doctest::Approx(0.5));
  for (std::size_t i = 0; i < two.numel(); ++i) CHECK(o2->value[i] == doctest::Approx(2.0 * two[i]));
}

TEST_CASE("channel attention: loop oracle and row sums on random inputs") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    Tape<double> t;
    auto m = random_tensor({2, 3, 2, 2}, 100 + s);
    blocks::AttentionTrace<double> tr;
    Tensor<double> ref_attn;
    auto o = blocks::channel_attention(t.leaf(m), &tr);
    CHECK(max_abs_diff(o->value, verify::channel_attention_naive(m, &ref_attn)) < 1e-10);
    CHECK(max_abs_diff(tr.attention, ref_attn) < 1e-10);
    for (std::int64_t r = 0; r < 6; ++r) {
      double sum = 0;
      for (int c = 0; c < 3; ++c) sum += tr.attention[r * 3 + c];
      CHECK(std::abs(sum - 1) < 1e-6);
    }
  }
}

TEST_CASE("mdsa: shape, zero input, and sequential composition") {
  Tape<double> t;
  auto w = random_tensor({64, 64, 3, 3}, 1, -0.05, 0.05);
  Tensor<double> b({64});
  auto p = dspa_params(t, w, b, 10);
  auto x = random_tensor({1, 64, 8, 8}, 2, -0.2, 0.2);
  CHECK(blocks::mdsa(t.leaf(x), p)->value.shape() == Shape{1, 64, 8, 8});
  CHECK(blocks::mdsa(t.leaf(Tensor<double>({1, 64, 8, 8})), p)->value == Tensor<double>({1, 64, 8, 8}));

  auto ws = random_tensor({3, 3, 3, 3}, 3, -0.5, 0.5), bs = random_tensor({3}, 4);
  auto xs = random_tensor({1, 3, 4, 4}, 5);
  auto ref = verify::channel_attention_naive(verify::dspa_naive(xs, ws, bs, 3));
  CHECK(max_abs_diff(blocks::mdsa(t.leaf(xs), dspa_params(t, ws, bs, 3))->value, ref) < 1e-10);
}

TEST_CASE("blocks: declared layouts and initialization") {
  std::vector<blocks::ParamSpec> specs;
  blocks::declare_msc(specs, "msc.1", 8);
  CHECK(specs.size() == 8);
  CHECK(specs[0].name == "msc.1.conv5.weight");
  CHECK(specs[0].shape == Shape{8, 8, 5, 5});
  CHECK(specs[0].fan_in == 200);
  CHECK(specs[6].shape == Shape{8, 32, 1, 1});
  blocks::declare_dspa(specs, "dspa.1", 8);
  CHECK(specs.back().name == "dspa.1.dilated.bias");

  auto p = blocks::initialize<double>(specs, 7);
  auto q = blocks::initialize<double>(specs, 7);
  auto r = blocks::initialize<double>(specs, 8);
  const double bound = std::sqrt(6.0 / 200);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    same = same && p[i].value == q[i].value;
    differs = differs || !(p[i].value == r[i].value);
  }
  CHECK(same);
  CHECK(differs);
  for (double v : p.at("msc.1.conv5.weight").data()) CHECK(std::abs(v) <= bound);
  CHECK(p.at("msc.1.conv5.bias") == Tensor<double>({8}));
}

TEST_CASE("blocks: gradients match finite differences") {
  ParameterSet<double> p;
  p.add("m", random_tensor({1, 3, 4, 4}, 1));
  p.add("w", random_tensor({3, 3, 3, 3}, 2, -0.5, 0.5));
  p.add("b", random_tensor({3}, 3, 0, 0.2));
  auto res = verify::gradient_check(p, [](const Binding<double>& b) {
    blocks::DspaParams<double> dp{{b.get("w"), b.get("b"), {1, 2, 2}}, 3};
    return verify::random_projection(blocks::mdsa(b.get("m"), dp), 4);
  });
  CHECK(verify::worst(res) < 1e-4);
}
