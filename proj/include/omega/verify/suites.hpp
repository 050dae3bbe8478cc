// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// Self-verification suites: finite-difference gradient checks, equivalence
// against scalar-loop oracles, and network shape contracts.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace omega::verify {

struct CheckLine {
  std::string name;
  double worst = 0;       // worst observed error (relative or absolute, see name)
  double tolerance = 0;
  std::size_t instances = 0;
  bool passed = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckLine> lines;
  double seconds = 0;
  bool passed() const;
};

/// Per-op and per-block checks at < 1e-4 plus the tiny end-to-end network
/// (depth 3, channels [4, 8, 16], K = 4, 16×16 input) at < 1e-3.
SuiteReport run_grad_suite(std::uint64_t seed = 1);

/// Per-block checks only (fast subset of run_grad_suite).
SuiteReport run_block_grad_suite(std::uint64_t seed = 1);

/// End-to-end network check only.
SuiteReport run_network_grad_suite(std::uint64_t seed = 1);

SuiteReport run_oracle_suite(std::size_t instances = 100, std::uint64_t seed = 1);

/// Output and bottleneck shapes for depth {3, 5} × input {32, 64}.
SuiteReport run_shape_suite();

void print_report(std::ostream& os, const SuiteReport& report);

}  // namespace omega::verify
