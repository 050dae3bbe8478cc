// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "omega/tensor.hpp"

namespace omega::data {

struct GrayImage {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// round-half-up of v·255; v must lie in [0, 1].
std::uint8_t quantize_unit(float v);

/// Binary P5, maxval 255. `image` is 1×H×W or H×W with values in [0, 1].
void write_pgm(const std::filesystem::path& path, const Tensor<float>& image);

/// 2×H×W binary mask → {0, 128, 255} for background, organ, tumor.
void write_mask_pgm(const std::filesystem::path& path, const Tensor<float>& mask);

GrayImage read_pgm(const std::filesystem::path& path);

}  // namespace omega::data
