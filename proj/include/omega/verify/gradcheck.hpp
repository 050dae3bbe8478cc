// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "omega/params.hpp"

namespace omega::verify {

/// Builds a scalar loss from the bound inputs on the given tape.
using LossGraph = std::function<Var<double>(const Binding<double>&)>;

struct GradCheckResult {
  std::string name;
  double rel_error = 0;  // ‖analytic − numeric‖₂ / max(‖analytic‖₂, ‖numeric‖₂)
  double max_abs_error = 0;
  double analytic_norm = 0;
  std::size_t checked = 0;
};

/// Central differences (f(θ+h) − f(θ−h)) / 2h for every element of every
/// input, against the tape gradient. `max_per_tensor` > 0 checks only an
/// evenly strided subset of each tensor's elements.
std::vector<GradCheckResult> gradient_check(ParameterSet<double>& inputs, const LossGraph& loss,
                                            double h = 1e-3, std::size_t max_per_tensor = 0);

/// Worst relative error across results.
double worst(const std::vector<GradCheckResult>& results);

/// Σ out ⊙ R for a fixed random R: a scalar whose gradient exercises every output.
Var<double> random_projection(const Var<double>& out, std::uint64_t seed);

}  // namespace omega::verify
