// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/cli.hpp"

int main(int argc, char** argv) { return omega::cli::main(argc, argv); }
