// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "omega/random.hpp"

namespace omega::data {

namespace {

constexpr std::uint64_t kGeometryStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

bool inside(const Disc& d, std::int64_t x, std::int64_t y) {
  const double dx = static_cast<double>(x) + 0.5 - d.cx;
  const double dy = static_cast<double>(y) + 0.5 - d.cy;
  return dx * dx + dy * dy <= d.r * d.r;
}

}  // namespace

void SyntheticSpec::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument("data spec: " + m); };
  if (image_size < 8) fail("image_size must be >= 8");
  if (n_samples < 1) fail("n_samples must be >= 1");
  if (!(0 < organ_radius_min && organ_radius_min <= organ_radius_max && organ_radius_max <= 0.5)) {
    fail("organ radius range must satisfy 0 < min <= max <= 0.5");
  }
  if (!(0 < tumor_radius_min && tumor_radius_min <= tumor_radius_max &&
        tumor_radius_max < organ_radius_min)) {
    fail("tumor radius range must satisfy 0 < min <= max < organ_radius_min");
  }
  if (noise_sigma < 0) fail("noise_sigma must be >= 0");
  for (double v : {background_level, organ_level, tumor_level}) {
    if (v < 0 || v > 1) fail("intensity levels must lie in [0, 1]");
  }
}

SampleGeometry sample_geometry(const SyntheticSpec& spec, std::int64_t index) {
  Rng rng(hash_combine(hash_combine(spec.seed, static_cast<std::uint64_t>(index)), kGeometryStream));
  const double size = static_cast<double>(spec.image_size);
  SampleGeometry g{};
  g.organ.r = size * rng.uniform(spec.organ_radius_min, spec.organ_radius_max);
  g.organ.cx = rng.uniform(g.organ.r, size - g.organ.r);
  g.organ.cy = rng.uniform(g.organ.r, size - g.organ.r);
  const int n_tumors = 1 + static_cast<int>(rng.below(3));
  for (int t = 0; t < n_tumors; ++t) {
    Disc d{};
    d.r = size * rng.uniform(spec.tumor_radius_min, spec.tumor_radius_max);
    const double reach = g.organ.r - d.r;
    const double rho = reach * std::sqrt(rng.uniform());
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    d.cx = g.organ.cx + rho * std::cos(theta);
    d.cy = g.organ.cy + rho * std::sin(theta);
    g.tumors.push_back(d);
  }
  return g;
}

Sample generate(const SyntheticSpec& spec, std::int64_t index) {
  const std::int64_t s = spec.image_size;
  const SampleGeometry g = sample_geometry(spec, index);
  Sample out{Tensor<float>(Shape{1, s, s}), Tensor<float>(Shape{2, s, s})};
  Rng noise(hash_combine(hash_combine(spec.seed, static_cast<std::uint64_t>(index)), kNoiseStream));
  for (std::int64_t y = 0; y < s; ++y) {
    for (std::int64_t x = 0; x < s; ++x) {
      const bool tumor = std::any_of(g.tumors.begin(), g.tumors.end(),
                                     [&](const Disc& d) { return inside(d, x, y); });
      // A tumor pixel is an organ pixel even if rounding puts it on the rim.
      const bool organ = tumor || inside(g.organ, x, y);
      double v = tumor ? spec.tumor_level : organ ? spec.organ_level : spec.background_level;
      if (spec.noise_sigma > 0) v += spec.noise_sigma * noise.normal();
      const std::size_t q = static_cast<std::size_t>(y * s + x);
      out.image[q] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      out.mask[q] = organ ? 1.0f : 0.0f;
      out.mask[static_cast<std::size_t>(s * s) + q] = tumor ? 1.0f : 0.0f;
    }
  }
  return out;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + name + "' (expected train, val or test)");
}

SplitRange split_range(std::int64_t n, Split split) {
  const std::int64_t n_train = n * 7 / 10;
  const std::int64_t n_val = n / 10;
  switch (split) {
    case Split::kTrain: return {0, n_train};
    case Split::kVal: return {n_train, n_train + n_val};
    case Split::kTest: return {n_train + n_val, n};
  }
  return {0, 0};
}

Batch make_batch(std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("make_batch: no samples");
  const Shape& is = samples[0].image.shape();
  const Shape& ms = samples[0].mask.shape();
  const auto n = static_cast<std::int64_t>(samples.size());
  Batch b{Tensor<float>(Shape{n, is[0], is[1], is[2]}), Tensor<float>(Shape{n, ms[0], ms[1], ms[2]})};
  for (std::int64_t i = 0; i < n; ++i) {
    const Sample& s = samples[static_cast<std::size_t>(i)];
    if (s.image.shape() != is || s.mask.shape() != ms) {
      throw ShapeError("make_batch: sample " + std::to_string(i) + " has a different shape");
    }
    std::copy(s.image.data().begin(), s.image.data().end(), b.images.ptr() + i * s.image.numel());
    std::copy(s.mask.data().begin(), s.mask.data().end(), b.masks.ptr() + i * s.mask.numel());
  }
  return b;
}

}  // namespace omega::data
