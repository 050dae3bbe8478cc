// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/dataset.hpp"

#include <cstdio>
#include <fstream>

#include "omega/config.hpp"
#include "omega/otf.hpp"
#include "omega/pgm.hpp"

namespace omega::data {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFormat = "omega-synthetic-1";
constexpr Split kSplits[] = {Split::kTrain, Split::kVal, Split::kTest};

Tensor<float> single_tensor(const fs::path& path, const char* name, const Shape& expect) {
  auto list = read_otf(path);
  if (list.size() != 1 || list[0].name != name) {
    throw DatasetError(path.string() + ": expected a single tensor named '" + name + "'");
  }
  if (list[0].value.shape() != expect) {
    throw DatasetError(path.string() + ": tensor '" + name + "' has shape " + shape_str(list[0].value.shape()) +
                       ", expected " + shape_str(expect));
  }
  return std::move(list[0].value);
}

}  // namespace

std::string sample_stem(std::int64_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld", static_cast<long long>(index));
  return buf;
}

nlohmann::json make_manifest(const SyntheticSpec& spec) {
  nlohmann::json splits = nlohmann::json::object();
  for (auto s : kSplits) {
    const auto r = split_range(spec.n_samples, s);
    splits[split_name(s)] = {{"begin", r.begin}, {"count", r.size()}};
  }
  return {{"format", kFormat}, {"spec", to_json(spec)}, {"splits", splits}};
}

void write_dataset(const fs::path& dir, const SyntheticSpec& spec, bool force) {
  spec.validate();
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw DatasetError(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!force) throw DatasetError(dir.string() + " is not empty (pass --force to overwrite)");
      fs::remove(dir / "manifest.json");
      for (auto s : kSplits) fs::remove_all(dir / split_name(s));
    }
  }
  for (auto s : kSplits) {
    const fs::path sub = dir / split_name(s);
    fs::create_directories(sub);
    const auto r = split_range(spec.n_samples, s);
    for (auto i = r.begin; i < r.end; ++i) {
      const auto sample = generate(spec, i);
      const auto stem = sample_stem(i);
      write_otf(sub / (stem + ".img.otf"), {{"image", sample.image}});
      write_otf(sub / (stem + ".mask.otf"), {{"mask", sample.mask}});
      write_pgm(sub / (stem + ".img.pgm"), sample.image);
    }
  }
  std::ofstream f(dir / "manifest.json", std::ios::trunc);
  if (!f) throw DatasetError("cannot write " + (dir / "manifest.json").string());
  f << make_manifest(spec).dump(2) << '\n';
}

nlohmann::json read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  std::ifstream f(path);
  if (!f) throw DatasetError("no dataset manifest at " + path.string() + " (run gen-data first)");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kFormat) {
    throw DatasetError(path.string() + ": not an omega dataset manifest");
  }
  return j;
}

SyntheticSpec manifest_spec(const nlohmann::json& manifest) {
  try {
    return synthetic_spec_from_json(manifest.at("spec"));
  } catch (const std::exception& e) {
    throw DatasetError(std::string("manifest spec: ") + e.what());
  }
}

std::vector<Sample> load_split(const fs::path& dir, Split split) {
  const auto spec = manifest_spec(read_manifest(dir));
  const auto r = split_range(spec.n_samples, split);
  const auto s = spec.image_size;
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(r.size()));
  const fs::path sub = dir / split_name(split);
  for (auto i = r.begin; i < r.end; ++i) {
    const auto stem = sample_stem(i);
    out.push_back({single_tensor(sub / (stem + ".img.otf"), "image", {1, s, s}),
                   single_tensor(sub / (stem + ".mask.otf"), "mask", {2, s, s})});
  }
  return out;
}

Tensor<float> load_image(const fs::path& path) {
  if (path.extension() == ".pgm") {
    const auto g = read_pgm(path);
    Tensor<float> t({1, g.height, g.width});
    for (std::size_t i = 0; i < g.pixels.size(); ++i) t[i] = static_cast<float>(g.pixels[i]) / 255.0f;
    return t;
  }
  auto list = read_otf(path);
  if (list.size() != 1) throw DatasetError(path.string() + ": expected exactly one image tensor");
  auto t = std::move(list[0].value);
  if (t.rank() == 2) t = t.reshaped({1, t.dim(0), t.dim(1)});
  if (t.rank() != 3 || t.dim(0) != 1) {
    throw ShapeError(path.string() + ": image must be 1×H×W, got " + shape_str(t.shape()));
  }
  return t;
}

}  // namespace omega::data
