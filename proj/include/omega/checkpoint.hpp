// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpoints are OTF files. The first tensor, "meta.model_config", carries
// the ModelConfig as JSON text, one UTF-8 byte per f32 element. Parameters
// follow under their dotted names (enc.1.conv1.weight, ...), then optional
// optimizer state under "optim.*".
#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>

#include "omega/omega_net.hpp"
#include "omega/optim.hpp"
#include "omega/otf.hpp"

namespace omega {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kConfigTensorName = "meta.model_config";

struct Checkpoint {
  ModelConfig config;
  ParameterSet<float> params;
  std::optional<train::AdamState<float>> optimizer;
};

void save_checkpoint(const std::filesystem::path& path, const OmegaNet<float>& net,
                     const train::AdamState<float>* optimizer = nullptr);

/// Validates every parameter shape against the embedded config; when
/// `expected` is given the embedded config must also equal it.
Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected = nullptr,
                           const train::AdamConfig& adam = {});

}  // namespace omega
