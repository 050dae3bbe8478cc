// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// On-disk synthetic dataset:
//
//   <dir>/manifest.json
//   <dir>/{train,val,test}/NNNN.img.otf    tensor "image", 1×H×W
//   <dir>/{train,val,test}/NNNN.mask.otf   tensor "mask",  2×H×W
//   <dir>/{train,val,test}/NNNN.img.pgm
//
// NNNN is the global sample index, zero-padded to four digits.
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "omega/synthetic.hpp"

namespace omega::data {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sample_stem(std::int64_t index);

nlohmann::json make_manifest(const SyntheticSpec& spec);

/// Refuses a non-empty `dir` unless `force`, in which case the previous
/// manifest and split directories are replaced.
void write_dataset(const std::filesystem::path& dir, const SyntheticSpec& spec, bool force);

nlohmann::json read_manifest(const std::filesystem::path& dir);

/// Spec recorded in the manifest.
SyntheticSpec manifest_spec(const nlohmann::json& manifest);

std::vector<Sample> load_split(const std::filesystem::path& dir, Split split);

/// Reads an image for inference: an OTF holding one 1×H×W (or H×W) tensor,
/// or a P5 PGM scaled to [0, 1].
Tensor<float> load_image(const std::filesystem::path& path);

}  // namespace omega::data
