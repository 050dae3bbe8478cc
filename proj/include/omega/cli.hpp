// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace omega::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,     // verification failed or unexpected error
  kConfig = 2,      // bad config, flags, or dataset
  kDivergence = 3,  // non-finite loss or gradient during training
  kCheckpoint = 4,  // checkpoint or tensor-shape mismatch
};

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace omega::cli
