// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/verify/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>

#include "omega/blocks.hpp"
#include "omega/omega_net.hpp"
#include "omega/random.hpp"
#include "omega/verify/gradcheck.hpp"
#include "omega/verify/oracles.hpp"

namespace omega::verify {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kBlockGradTol = 1e-4;
constexpr double kNetworkGradTol = 1e-3;
constexpr double kOracleTol = 1e-10;
// A 1e-3 step crosses ReLU and max-pool kinks somewhere in the network.
constexpr double kNetworkStep = 1e-6;

T64 random_tensor(const Shape& s, Rng& rng, double lo = -1.0, double hi = 1.0) {
  T64 t(s);
  for (auto& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

std::int64_t pick(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

double max_scaled_diff(const T64& a, const T64& b) {
  if (a.shape() != b.shape()) return INFINITY;
  double worst = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
  }
  return worst;
}

struct Timer {
  Clock::time_point start = Clock::now();
  double seconds() const { return std::chrono::duration<double>(Clock::now() - start).count(); }
};

CheckLine grad_line(const std::string& name, ParameterSet<double>& inputs, const LossGraph& loss,
                    double tol) {
  const auto results = gradient_check(inputs, loss);
  CheckLine line{name, worst(results), tol, results.size(), false};
  line.passed = line.worst < tol;
  return line;
}

ParameterSet<double> named(std::initializer_list<std::pair<const char*, T64>> items) {
  ParameterSet<double> p;
  for (const auto& [n, t] : items) p.add(n, t);
  return p;
}

blocks::ConvParams<double> conv_of(const Binding<double>& b, const char* w, const char* bias,
                                   kernels::ConvGeometry g) {
  return {b.get(w), b.get(bias), g};
}

void block_grad_checks(SuiteReport& rep, std::uint64_t seed) {
  Rng rng(seed);
  std::uint64_t proj = seed * 1000;
  auto check = [&](const std::string& name, ParameterSet<double>& p,
                   std::function<Var<double>(const Binding<double>&)> out) {
    const std::uint64_t s = ++proj;
    rep.lines.push_back(grad_line(
        name, p, [out, s](const Binding<double>& b) { return random_projection(out(b), s); }, kBlockGradTol));
  };

  {
    auto p = named({{"x", random_tensor({1, 3, 5, 5}, rng)},
                    {"w", random_tensor({2, 3, 3, 3}, rng)},
                    {"b", random_tensor({2}, rng)}});
    for (auto g : {kernels::ConvGeometry{1, 1, 1}, kernels::ConvGeometry{2, 1, 1},
                   kernels::ConvGeometry{1, 2, 2}}) {
      const std::uint64_t s = ++proj;
      rep.lines.push_back(grad_line(
          "grad conv2d stride=" + std::to_string(g.stride) + " pad=" + std::to_string(g.pad) +
              " dilation=" + std::to_string(g.dilation),
          p,
          [&, g, s](const Binding<double>& b) {
            return random_projection(ops::conv2d(b.get("x"), b.get("w"), b.get("b"), g), s);
          },
          kBlockGradTol));
    }
  }
  {
    auto p = named({{"x", random_tensor({1, 3, 3, 3}, rng)},
                    {"w", random_tensor({3, 2, 2, 2}, rng)},
                    {"b", random_tensor({2}, rng)}});
    check("grad transposed_conv2d", p, [&](const Binding<double>& b) {
      return ops::transposed_conv2d(b.get("x"), b.get("w"), b.get("b"), 2);
    });
  }
  {
    auto p = named({{"x", random_tensor({1, 2, 4, 4}, rng)}});
    check("grad maxpool2d", p, [&](const Binding<double>& b) {
      return ops::maxpool2d(b.get("x"), 2);
    });
    check("grad adaptive_avg_pool_to_k", p, [&](const Binding<double>& b) {
      return ops::adaptive_avg_pool_to_k(b.get("x"), 3);
    });
    check("grad sigmoid", p, [&](const Binding<double>& b) {
      return ops::sigmoid(b.get("x"));
    });
    check("grad fan-out (x used twice)", p, [&](const Binding<double>& b) {
      const auto& x = b.get("x");
      return ops::add(ops::mul(x, x), ops::scale(x, 3.0));
    });
  }
  {
    auto p = named({{"a", random_tensor({2, 3, 4}, rng)}, {"b", random_tensor({2, 4, 5}, rng)}});
    check("grad matmul batched", p, [&](const Binding<double>& b) {
      return ops::matmul(b.get("a"), b.get("b"));
    });
    auto q = named({{"a", random_tensor({2, 4, 3}, rng)}, {"b", random_tensor({2, 5, 4}, rng)}});
    check("grad matmul transposed operands", q, [&](const Binding<double>& b) {
      return ops::matmul(b.get("a"), b.get("b"), true, true);
    });
  }
  {
    auto p = named({{"x", random_tensor({3, 5}, rng, -2, 2)}});
    check("grad softmax_rows", p, [&](const Binding<double>& b) {
      return ops::softmax_rows(b.get("x"));
    });
  }
  {
    auto p = named({{"m", random_tensor({1, 3, 4, 4}, rng)},
                    {"w", random_tensor({3, 3, 3, 3}, rng, -0.5, 0.5)},
                    {"b", random_tensor({3}, rng, 0, 0.2)}});
    check("grad dspa", p, [&](const Binding<double>& b) {
      blocks::DspaParams<double> dp{conv_of(b, "w", "b", {1, 2, 2}), 3};
      return blocks::dspa(b.get("m"), dp);
    });
    check("grad mdsa", p, [&](const Binding<double>& b) {
      blocks::DspaParams<double> dp{conv_of(b, "w", "b", {1, 2, 2}), 3};
      return blocks::mdsa(b.get("m"), dp);
    });
  }
  {
    auto p = named({{"m", random_tensor({1, 3, 4, 4}, rng, -0.5, 0.5)}});
    check("grad channel_attention", p, [&](const Binding<double>& b) {
      return blocks::channel_attention(b.get("m"));
    });
  }
  {
    auto p = named({{"x", random_tensor({1, 3, 4, 4}, rng)},
                    {"w5", random_tensor({3, 3, 5, 5}, rng, -0.3, 0.3)},
                    {"b5", random_tensor({3}, rng, -0.1, 0.1)},
                    {"w3", random_tensor({3, 3, 3, 3}, rng, -0.3, 0.3)},
                    {"b3", random_tensor({3}, rng, -0.1, 0.1)},
                    {"w1", random_tensor({3, 3, 1, 1}, rng)},
                    {"b1", random_tensor({3}, rng, -0.1, 0.1)},
                    {"wf", random_tensor({3, 12, 1, 1}, rng)},
                    {"bf", random_tensor({3}, rng, -0.1, 0.1)}});
    check("grad cascade_msc", p, [&](const Binding<double>& b) {
      blocks::MscParams<double> mp{conv_of(b, "w5", "b5", {1, 2, 1}), conv_of(b, "w3", "b3", {1, 1, 1}),
                                   conv_of(b, "w1", "b1", {1, 0, 1}), conv_of(b, "wf", "bf", {1, 0, 1})};
      return blocks::cascade_msc(b.get("x"), mp);
    });
  }
  {
    auto p = named({{"x", random_tensor({1, 2, 4, 4}, rng)},
                    {"w1", random_tensor({3, 2, 3, 3}, rng, -0.5, 0.5)},
                    {"b1", random_tensor({3}, rng, -0.1, 0.1)},
                    {"w2", random_tensor({3, 3, 3, 3}, rng, -0.5, 0.5)},
                    {"b2", random_tensor({3}, rng, -0.1, 0.1)}});
    check("grad conv_block", p, [&](const Binding<double>& b) {
      blocks::ConvBlockParams<double> cp{conv_of(b, "w1", "b1", {1, 1, 1}), conv_of(b, "w2", "b2", {1, 1, 1})};
      return blocks::conv_block(b.get("x"), cp);
    });
  }
  {
    T64 mask({1, 2, 3, 3});
    for (auto& v : mask.data()) v = rng.uniform() < 0.4 ? 1.0 : 0.0;
    auto p = named({{"z", random_tensor({1, 2, 3, 3}, rng, -3, 3)}});
    rep.lines.push_back(grad_line("grad bce_with_logits", p, [&](const Binding<double>& b) {
      return ops::bce_with_logits(b.get("z"), mask);
    }, kBlockGradTol));
  }
}

void network_grad_check(SuiteReport& rep, std::uint64_t seed) {
  const ModelConfig cfg = ModelConfig::toy(3, 4, 16, 4);
  OmegaNet<double> net(cfg, seed);
  Rng rng(seed ^ 0xABCDu);
  const T64 x = random_tensor({1, 1, 16, 16}, rng, 0, 1);
  T64 mask({1, 2, 16, 16});
  for (auto& v : mask.data()) v = rng.uniform() < 0.3 ? 1.0 : 0.0;
  const auto results = gradient_check(net.parameters(), [&](const Binding<double>& b) {
    const auto out = net.forward(b, b[0]->tape->leaf(x, false));
    return dual_loss(out, mask, cfg.lambda_s, cfg.lambda_a);
  }, kNetworkStep);
  CheckLine line{"grad end-to-end network (every parameter tensor)", worst(results), kNetworkGradTol,
                 results.size(), false};
  line.passed = line.worst < kNetworkGradTol;
  rep.lines.push_back(line);
}

template <typename F>
CheckLine oracle_line(const std::string& name, std::size_t instances, double tol, F&& one) {
  CheckLine line{name, 0, tol, instances, false};
  for (std::size_t i = 0; i < instances; ++i) line.worst = std::max(line.worst, one(i));
  line.passed = line.worst <= tol;
  return line;
}

}  // namespace

bool SuiteReport::passed() const {
  return !lines.empty() && std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.passed; });
}

SuiteReport run_block_grad_suite(std::uint64_t seed) {
  Timer t;
  SuiteReport rep{"grad", {}, 0};
  block_grad_checks(rep, seed);
  rep.seconds = t.seconds();
  return rep;
}

SuiteReport run_network_grad_suite(std::uint64_t seed) {
  Timer t;
  SuiteReport rep{"grad", {}, 0};
  network_grad_check(rep, seed);
  rep.seconds = t.seconds();
  return rep;
}

SuiteReport run_grad_suite(std::uint64_t seed) {
  Timer t;
  SuiteReport rep{"grad", {}, 0};
  block_grad_checks(rep, seed);
  network_grad_check(rep, seed);
  rep.seconds = t.seconds();
  return rep;
}

SuiteReport run_oracle_suite(std::size_t instances, std::uint64_t seed) {
  Timer t;
  SuiteReport rep{"oracle", {}, 0};
  Rng rng(seed);

  rep.lines.push_back(oracle_line("oracle conv2d (im2col+gemm vs 4-loop)", instances, kOracleTol, [&](std::size_t) {
    for (;;) {
      const auto n = pick(rng, 1, 2), c = pick(rng, 1, 4), h = pick(rng, 3, 9), w = pick(rng, 3, 9);
      const auto o = pick(rng, 1, 3), k = 2 * pick(rng, 0, 2) + 1;
      const int stride = static_cast<int>(pick(rng, 1, 2)), dil = static_cast<int>(pick(rng, 1, 2));
      const int pad = static_cast<int>(pick(rng, 0, 2));
      const kernels::ConvGeometry g{stride, pad, dil};
      if (kernels::conv_out_extent(h, k, g) < 1 || kernels::conv_out_extent(w, k, g) < 1) continue;
      const T64 x = random_tensor({n, c, h, w}, rng), wt = random_tensor({o, c, k, k}, rng), b = random_tensor({o}, rng);
      return max_scaled_diff(kernels::conv2d_forward(x, wt, &b, g), conv2d_naive(x, wt, b, stride, pad, dil));
    }
  }));

  rep.lines.push_back(oracle_line("oracle transposed_conv2d (vs scatter)", instances, kOracleTol, [&](std::size_t) {
    const auto n = pick(rng, 1, 2), ci = pick(rng, 1, 4), co = pick(rng, 1, 4), h = pick(rng, 1, 6), w = pick(rng, 1, 6);
    const T64 x = random_tensor({n, ci, h, w}, rng), wt = random_tensor({ci, co, 2, 2}, rng), b = random_tensor({co}, rng);
    return max_scaled_diff(kernels::conv_transpose2d_forward(x, wt, &b, 2), transposed_conv2d_naive(x, wt, b, 2));
  }));

  rep.lines.push_back(oracle_line("oracle maxpool2d", instances, kOracleTol, [&](std::size_t) {
    const T64 x = random_tensor({pick(rng, 1, 2), pick(rng, 1, 3), 2 * pick(rng, 1, 5), 2 * pick(rng, 1, 5)}, rng);
    return max_scaled_diff(kernels::maxpool2d_forward(x, 2).out, maxpool2d_naive(x, 2));
  }));

  rep.lines.push_back(oracle_line("oracle softmax_rows", instances, kOracleTol, [&](std::size_t) {
    Tape<double> tape;
    const T64 x = random_tensor({pick(rng, 1, 6), pick(rng, 1, 9)}, rng, -4, 4);
    return max_scaled_diff(ops::softmax_rows(tape.leaf(x))->value, softmax_rows_naive(x));
  }));

  rep.lines.push_back(oracle_line("oracle matmul", instances, kOracleTol, [&](std::size_t) {
    Tape<double> tape;
    const auto r = pick(rng, 1, 6), s = pick(rng, 1, 6), c = pick(rng, 1, 6);
    const T64 a = random_tensor({r, s}, rng), b = random_tensor({s, c}, rng);
    return max_scaled_diff(ops::matmul(tape.leaf(a), tape.leaf(b))->value, matmul_naive(a, b));
  }));

  rep.lines.push_back(oracle_line("oracle dspa (literal position attention)", instances, kOracleTol, [&](std::size_t) {
    Tape<double> tape;
    const auto c = pick(rng, 1, 4), h = pick(rng, 2, 5), w = pick(rng, 2, 5);
    const auto k = pick(rng, 1, std::min<std::int64_t>(h * w, 6));
    const T64 m = random_tensor({pick(rng, 1, 2), c, h, w}, rng);
    const T64 wt = random_tensor({c, c, 3, 3}, rng, -0.5, 0.5), b = random_tensor({c}, rng, -0.1, 0.1);
    blocks::DspaParams<double> p{{tape.leaf(wt), tape.leaf(b), {1, 2, 2}}, k};
    return max_scaled_diff(blocks::dspa(tape.leaf(m), p)->value, dspa_naive(m, wt, b, k));
  }));

  rep.lines.push_back(oracle_line("oracle channel_attention (literal CA)", instances, kOracleTol, [&](std::size_t) {
    Tape<double> tape;
    const T64 m = random_tensor({pick(rng, 1, 2), pick(rng, 1, 4), pick(rng, 1, 4), pick(rng, 1, 4)}, rng, -0.7, 0.7);
    return max_scaled_diff(blocks::channel_attention(tape.leaf(m))->value, channel_attention_naive(m));
  }));

  rep.lines.push_back(oracle_line("oracle cascade_msc", instances, kOracleTol, [&](std::size_t) {
    Tape<double> tape;
    const auto c = pick(rng, 1, 3), h = pick(rng, 2, 6), w = pick(rng, 2, 6);
    MscWeights wts{random_tensor({c, c, 5, 5}, rng), random_tensor({c}, rng), random_tensor({c, c, 3, 3}, rng),
                   random_tensor({c}, rng),          random_tensor({c, c, 1, 1}, rng), random_tensor({c}, rng),
                   random_tensor({c, 4 * c, 1, 1}, rng), random_tensor({c}, rng)};
    auto lv = [&](const T64& v) { return tape.leaf(v); };
    blocks::MscParams<double> p{{lv(wts.w5), lv(wts.b5), {1, 2, 1}}, {lv(wts.w3), lv(wts.b3), {1, 1, 1}},
                                {lv(wts.w1), lv(wts.b1), {1, 0, 1}}, {lv(wts.wf), lv(wts.bf), {1, 0, 1}}};
    const T64 x = random_tensor({1, c, h, w}, rng);
    return max_scaled_diff(blocks::cascade_msc(lv(x), p)->value, cascade_msc_naive(x, wts));
  }));

  rep.lines.push_back(oracle_line("oracle bce_with_logits", instances, kOracleTol, [&](std::size_t) {
    Tape<double> tape;
    const T64 z = random_tensor({1, 2, pick(rng, 1, 5), pick(rng, 1, 5)}, rng, -5, 5);
    T64 y(z.shape());
    for (auto& v : y.data()) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
    return std::abs(ops::bce_with_logits(tape.leaf(z), y)->value[0] - bce_naive(z, y));
  }));

  rep.lines.push_back(oracle_line("oracle metrics (exact pixel counts)", instances, 0.0, [&](std::size_t i) {
    const auto n = pick(rng, 1, 2), h = pick(rng, 1, 8), w = pick(rng, 1, 8);
    Tensor<float> prob({n, 2, h, w}), mask({n, 2, h, w});
    // Sweep sparsity so that empty channels and empty predictions both occur.
    const double p_pos = static_cast<double>(i % 5) / 4.0;
    for (std::size_t q = 0; q < prob.numel(); ++q) {
      prob[q] = static_cast<float>(rng.uniform() < p_pos ? rng.uniform(0.5, 1.0) : rng.uniform(0.0, 0.5));
      mask[q] = rng.uniform() < p_pos ? 1.0f : 0.0f;
    }
    const auto got = train::compute_metrics(prob, mask, 0.5);
    const auto ref = metrics_naive(prob, mask, 0.5);
    double mismatch = 0;
    for (std::size_t c = 0; c < got.channels.size(); ++c) {
      const auto& a = got.channels[c];
      const auto& b = ref.channels[c];
      if (a.tp != b.tp || a.fp != b.fp || a.fn != b.fn || a.tn != b.tn) mismatch = 1;
      if (a.dsc != b.dsc || a.ppv != b.ppv || a.sensitivity != b.sensitivity) mismatch = 1;
    }
    return mismatch;
  }));

  rep.seconds = t.seconds();
  return rep;
}

SuiteReport run_shape_suite() {
  Timer t;
  SuiteReport rep{"shape", {}, 0};
  for (int depth : {3, 5}) {
    for (std::int64_t size : {32, 64}) {
      const ModelConfig cfg = ModelConfig::toy(depth, 4, size, 10);
      OmegaNet<float> net(cfg, 1);
      Tape<float> tape;
      ForwardTrace<float> trace;
      const auto out = net.forward(tape, Tensor<float>({1, 1, size, size}, 0.5f), false, &trace);
      const Shape expect{1, cfg.out_channels, size, size};
      const Shape bottleneck{1, cfg.encoder_channels.back(), size >> (depth - 1), size >> (depth - 1)};
      const bool ok = out.main_logits->value.shape() == expect && out.aux_logits->value.shape() == expect &&
                      trace.encoder.back().shape() == bottleneck;
      rep.lines.push_back({"shape depth=" + std::to_string(depth) + " input=" + std::to_string(size), ok ? 0.0 : 1.0,
                           0.0, 1, ok});
    }
  }
  rep.seconds = t.seconds();
  return rep;
}

void print_report(std::ostream& os, const SuiteReport& report) {
  for (const auto& l : report.lines) {
    os << (l.passed ? "PASS " : "FAIL ") << std::left << std::setw(58) << l.name << " worst=" << std::scientific
       << std::setprecision(3) << l.worst << " tol=" << l.tolerance << " n=" << l.instances << '\n';
  }
  os << std::defaultfloat << "suite " << report.suite << ": " << (report.passed() ? "PASS" : "FAIL") << " ("
     << std::fixed << std::setprecision(1) << report.seconds << " s)" << std::defaultfloat << '\n';
}

}  // namespace omega::verify
