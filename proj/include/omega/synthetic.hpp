// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic small-object segmentation data: one bright disc ("organ") per
// image containing 1–3 much smaller, brighter discs ("tumors").
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "omega/tensor.hpp"

namespace omega::data {

struct SyntheticSpec {
  std::int64_t image_size = 64;
  std::int64_t n_samples = 64;
  double organ_radius_min = 0.15;  // fractions of image_size
  double organ_radius_max = 0.30;
  double tumor_radius_min = 0.02;
  double tumor_radius_max = 0.06;
  double noise_sigma = 0.05;
  double background_level = 0.1;
  double organ_level = 0.6;
  double tumor_level = 0.9;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

struct Disc {
  double cx, cy, r;  // pixel units; pixel (x, y) has center (x + 0.5, y + 0.5)
};

struct SampleGeometry {
  Disc organ;
  std::vector<Disc> tumors;
};

struct Sample {
  Tensor<float> image;  // 1×H×W in [0, 1]
  Tensor<float> mask;   // 2×H×W, channel 0 organ, channel 1 tumor
};

struct Batch {
  Tensor<float> images;  // N×1×H×W
  Tensor<float> masks;   // N×2×H×W
};

/// Geometry of sample `index`, a pure function of (spec.seed, index).
SampleGeometry sample_geometry(const SyntheticSpec& spec, std::int64_t index);

Sample generate(const SyntheticSpec& spec, std::int64_t index);

enum class Split { kTrain, kVal, kTest };

const char* split_name(Split s);
Split parse_split(const std::string& name);

struct SplitRange {
  std::int64_t begin, end;  // [begin, end) over sample indices
  std::int64_t size() const { return end - begin; }
};

/// 70/10/20 by index: train = ⌊0.7n⌋, val = ⌊0.1n⌋, test takes the remainder.
SplitRange split_range(std::int64_t n_samples, Split split);

Batch make_batch(std::span<const Sample> samples);

}  // namespace omega::data
