// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/pgm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace omega::data {

namespace {

void write_p5(const std::filesystem::path& path, std::int64_t w, std::int64_t h,
              const std::vector<std::uint8_t>& px) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << "P5\n" << w << ' ' << h << "\n255\n";
  f.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

std::uint8_t quantize_unit(float v) {
  if (!(v >= 0.0f && v <= 1.0f)) {
    throw std::invalid_argument("pixel value " + std::to_string(v) + " outside [0, 1]");
  }
  return static_cast<std::uint8_t>(std::floor(static_cast<double>(v) * 255.0 + 0.5));
}

void write_pgm(const std::filesystem::path& path, const Tensor<float>& image) {
  const Shape& s = image.shape();
  if (!(s.size() == 2 || (s.size() == 3 && s[0] == 1))) {
    throw ShapeError("write_pgm expects 1×H×W or H×W, got " + shape_str(s));
  }
  const std::int64_t h = s[s.size() - 2], w = s[s.size() - 1];
  std::vector<std::uint8_t> px(image.numel());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = quantize_unit(image[i]);
  write_p5(path, w, h, px);
}

void write_mask_pgm(const std::filesystem::path& path, const Tensor<float>& mask) {
  const Shape& s = mask.shape();
  if (s.size() != 3 || s[0] != 2) throw ShapeError("write_mask_pgm expects 2×H×W, got " + shape_str(s));
  const std::int64_t h = s[1], w = s[2], plane = h * w;
  std::vector<std::uint8_t> px(static_cast<std::size_t>(plane));
  for (std::int64_t q = 0; q < plane; ++q) {
    const float organ = mask[q], tumor = mask[plane + q];
    if ((organ != 0.0f && organ != 1.0f) || (tumor != 0.0f && tumor != 1.0f)) {
      throw std::invalid_argument("write_mask_pgm: mask values must be 0 or 1");
    }
    px[q] = tumor == 1.0f ? 255 : organ == 1.0f ? 128 : 0;
  }
  write_p5(path, w, h, px);
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  if (token() != "P5") throw std::runtime_error(path.string() + ": not a binary PGM (P5)");
  GrayImage img;
  try {
    img.width = std::stoll(token());
    img.height = std::stoll(token());
    if (std::stoll(token()) != 255) throw std::runtime_error("unsupported maxval");
  } catch (const std::logic_error&) {
    throw std::runtime_error(path.string() + ": malformed PGM header");
  }
  ++pos;  // single whitespace before the raster
  const auto count = static_cast<std::size_t>(img.width * img.height);
  if (img.width < 1 || img.height < 1 || bytes.size() < pos + count) {
    throw std::runtime_error(path.string() + ": truncated PGM raster");
  }
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return img;
}

}  // namespace omega::data
