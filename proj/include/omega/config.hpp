// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON run configuration. Parsing is strict: unknown keys and wrongly typed
// values are errors. Hyperparameters may be omitted (defaults apply); paths
// may not.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "omega/omega_net.hpp"
#include "omega/synthetic.hpp"
#include "omega/trainer.hpp"

namespace omega {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PathsConfig {
  std::filesystem::path data_dir;
  std::filesystem::path checkpoint;
  std::filesystem::path metrics_csv;
};

struct RunConfig {
  ModelConfig model;
  train::TrainLoopConfig train;
  data::SyntheticSpec data;
  PathsConfig paths;

  /// Cross-section checks (e.g. data.image_size == model.input_size).
  void validate() const;
};

nlohmann::json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const data::SyntheticSpec& spec);
data::SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const train::TrainLoopConfig& cfg);
train::TrainLoopConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

/// Reads, parses, and validates; every failure is a ConfigError naming the file.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace omega
