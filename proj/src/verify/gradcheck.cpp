// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/verify/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "omega/ops.hpp"
#include "omega/random.hpp"

namespace omega::verify {

namespace {

double evaluate(const ParameterSet<double>& inputs, const LossGraph& loss) {
  Tape<double> tape;
  const Binding<double> b(inputs, tape, false);
  return loss(b)->value[0];
}

}  // namespace

std::vector<GradCheckResult> gradient_check(ParameterSet<double>& inputs, const LossGraph& loss, double h,
                                            std::size_t max_per_tensor) {
  std::vector<Tensor<double>> analytic;
  {
    Tape<double> tape;
    const Binding<double> b(inputs, tape, true);
    tape.backward(loss(b));
    analytic = b.gradients(tape);
  }
  std::vector<GradCheckResult> results;
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    Tensor<double>& value = inputs[p].value;
    const std::size_t n = value.numel();
    const std::size_t stride = (max_per_tensor > 0 && n > max_per_tensor) ? (n + max_per_tensor - 1) / max_per_tensor : 1;
    GradCheckResult r;
    r.name = inputs[p].name;
    double diff2 = 0, a2 = 0, n2 = 0;
    for (std::size_t i = 0; i < n; i += stride) {
      const double saved = value[i];
      value[i] = saved + h;
      const double fp = evaluate(inputs, loss);
      value[i] = saved - h;
      const double fm = evaluate(inputs, loss);
      value[i] = saved;
      const double numeric = (fp - fm) / (2 * h);
      const double a = analytic[p][i];
      diff2 += (a - numeric) * (a - numeric);
      a2 += a * a;
      n2 += numeric * numeric;
      r.max_abs_error = std::max(r.max_abs_error, std::abs(a - numeric));
      ++r.checked;
    }
    const double denom = std::max(std::sqrt(a2), std::sqrt(n2));
    r.analytic_norm = std::sqrt(a2);
    r.rel_error = denom > 0 ? std::sqrt(diff2) / denom : 0.0;
    results.push_back(r);
  }
  return results;
}

double worst(const std::vector<GradCheckResult>& results) {
  double w = 0;
  for (const auto& r : results) w = std::max(w, r.rel_error);
  return w;
}

Var<double> random_projection(const Var<double>& out, std::uint64_t seed) {
  Rng rng(seed);
  Tensor<double> r(out->value.shape());
  for (auto& v : r.data()) v = rng.uniform(-1.0, 1.0);
  return ops::sum(ops::mul(out, out->tape->leaf(std::move(r), false)));
}

}  // namespace omega::verify
