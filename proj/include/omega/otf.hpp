// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
//
// OTF: a little-endian container of named f32 tensors.
//
//   "OTF1"             4 bytes
//   count              u32
//   per tensor:
//     name length      u16, then that many UTF-8 bytes
//     rank             u8
//     extents          rank × u32
//     payload          product(extents) × f32
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "omega/params.hpp"

namespace omega::data {

class OtfError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TensorList = std::vector<NamedTensor<float>>;

std::vector<std::uint8_t> encode_otf(const TensorList& tensors);
TensorList decode_otf(const std::vector<std::uint8_t>& bytes);

void write_otf(const std::filesystem::path& path, const TensorList& tensors);
TensorList read_otf(const std::filesystem::path& path);

}  // namespace omega::data
