// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/config.hpp"

#include <fstream>
#include <set>

namespace omega {

using nlohmann::json;

namespace {

// Reads fields from one JSON object and rejects any key it was not asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  template <typename V>
  void opt(const char* key, V& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<V>();
    } catch (const json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  template <typename V>
  void req(const char* key, V& out) {
    if (!j_.contains(key)) throw ConfigError(where_ + "." + key + ": required");
    opt(key, out);
  }

  const json& sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(where_ + "." + key + ": required");
    return *it;
  }

  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <typename F>
auto validated(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

json to_json(const ModelConfig& c) {
  return json{{"depth", c.depth},
              {"encoder_channels", c.encoder_channels},
              {"decoder_channels", c.decoder_channels},
              {"out_channels", c.out_channels},
              {"k", c.k},
              {"lambda_s", c.lambda_s},
              {"lambda_a", c.lambda_a},
              {"input_size", c.input_size},
              {"use_mdsa", c.use_mdsa}};
}

ModelConfig model_config_from_json(const json& j) {
  ModelConfig c;
  ObjectReader r(j, "model");
  r.opt("depth", c.depth);
  r.opt("encoder_channels", c.encoder_channels);
  if (r.has("encoder_channels") && !r.has("decoder_channels")) {
    c.decoder_channels.assign(c.encoder_channels.rbegin(), c.encoder_channels.rend());
  }
  r.opt("decoder_channels", c.decoder_channels);
  r.opt("out_channels", c.out_channels);
  r.opt("k", c.k);
  r.opt("lambda_s", c.lambda_s);
  r.opt("lambda_a", c.lambda_a);
  r.opt("input_size", c.input_size);
  r.opt("use_mdsa", c.use_mdsa);
  r.finish();
  validated("model", [&] {
    c.validate();
    return 0;
  });
  return c;
}

json to_json(const data::SyntheticSpec& s) {
  return json{{"image_size", s.image_size},
              {"n_samples", s.n_samples},
              {"organ_radius", {s.organ_radius_min, s.organ_radius_max}},
              {"tumor_radius", {s.tumor_radius_min, s.tumor_radius_max}},
              {"noise_sigma", s.noise_sigma},
              {"levels", {s.background_level, s.organ_level, s.tumor_level}},
              {"seed", s.seed}};
}

data::SyntheticSpec synthetic_spec_from_json(const json& j) {
  data::SyntheticSpec s;
  ObjectReader r(j, "data");
  r.opt("image_size", s.image_size);
  r.opt("n_samples", s.n_samples);
  std::vector<double> organ{s.organ_radius_min, s.organ_radius_max};
  std::vector<double> tumor{s.tumor_radius_min, s.tumor_radius_max};
  std::vector<double> levels{s.background_level, s.organ_level, s.tumor_level};
  r.opt("organ_radius", organ);
  r.opt("tumor_radius", tumor);
  r.opt("levels", levels);
  r.opt("noise_sigma", s.noise_sigma);
  r.opt("seed", s.seed);
  r.finish();
  if (organ.size() != 2) throw ConfigError("data.organ_radius: expected [min, max]");
  if (tumor.size() != 2) throw ConfigError("data.tumor_radius: expected [min, max]");
  if (levels.size() != 3) throw ConfigError("data.levels: expected [background, organ, tumor]");
  s.organ_radius_min = organ[0];
  s.organ_radius_max = organ[1];
  s.tumor_radius_min = tumor[0];
  s.tumor_radius_max = tumor[1];
  s.background_level = levels[0];
  s.organ_level = levels[1];
  s.tumor_level = levels[2];
  validated("data", [&] {
    s.validate();
    return 0;
  });
  return s;
}

json to_json(const train::TrainLoopConfig& c) {
  return json{{"epochs", c.epochs},
              {"micro_batch_size", c.micro_batch_size},
              {"accumulation_steps", c.accumulation_steps},
              {"eval_interval", c.eval_interval},
              {"max_steps", c.max_steps},
              {"threshold", c.threshold},
              {"seed", c.seed},
              {"lr", c.adam.lr},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"eps", c.adam.eps},
              {"weight_decay", c.adam.weight_decay}};
}

train::TrainLoopConfig train_config_from_json(const json& j) {
  train::TrainLoopConfig c;
  ObjectReader r(j, "train");
  r.opt("epochs", c.epochs);
  r.opt("micro_batch_size", c.micro_batch_size);
  r.opt("accumulation_steps", c.accumulation_steps);
  r.opt("eval_interval", c.eval_interval);
  r.opt("max_steps", c.max_steps);
  r.opt("threshold", c.threshold);
  r.opt("seed", c.seed);
  r.opt("lr", c.adam.lr);
  r.opt("beta1", c.adam.beta1);
  r.opt("beta2", c.adam.beta2);
  r.opt("eps", c.adam.eps);
  r.opt("weight_decay", c.adam.weight_decay);
  r.finish();
  validated("train", [&] {
    c.validate();
    return 0;
  });
  return c;
}

json to_json(const RunConfig& c) {
  return json{{"model", to_json(c.model)},
              {"train", to_json(c.train)},
              {"data", to_json(c.data)},
              {"paths",
               {{"data_dir", c.paths.data_dir.string()},
                {"checkpoint", c.paths.checkpoint.string()},
                {"metrics_csv", c.paths.metrics_csv.string()}}}};
}

void RunConfig::validate() const {
  if (data.image_size != model.input_size) {
    throw ConfigError("data.image_size (" + std::to_string(data.image_size) +
                      ") must equal model.input_size (" + std::to_string(model.input_size) + ")");
  }
  if (model.out_channels != 2) {
    throw ConfigError("model.out_channels must be 2 for the organ/tumor masks");
  }
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  ObjectReader r(j, "config");
  c.model = model_config_from_json(r.sub("model"));
  c.train = train_config_from_json(r.sub("train"));
  c.data = synthetic_spec_from_json(r.sub("data"));
  const json& paths = r.sub("paths");
  r.finish();
  ObjectReader p(paths, "paths");
  std::string data_dir, checkpoint, metrics_csv;
  p.req("data_dir", data_dir);
  p.req("checkpoint", checkpoint);
  p.req("metrics_csv", metrics_csv);
  p.finish();
  c.paths = {data_dir, checkpoint, metrics_csv};
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  try {
    return run_config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace omega
