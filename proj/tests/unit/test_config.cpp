// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>

#include "omega/config.hpp"
#include "../test_util.hpp"

using namespace omega;
using nlohmann::json;

namespace {

json minimal() {
  return json{{"model", json::object()},
              {"train", json::object()},
              {"data", {{"image_size", 512}}},
              {"paths", {{"data_dir", "d"}, {"checkpoint", "c.otf"}, {"metrics_csv", "m.csv"}}}};
}

std::string message_of(const json& j) {
  try {
    run_config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config: empty sections take the default hyperparameters") {
  const auto c = run_config_from_json(minimal());
  CHECK(c.model == ModelConfig{});
  CHECK(c.model.encoder_channels == std::vector<std::int64_t>{64, 128, 256, 512, 1024});
  CHECK(c.model.k == 10);
  CHECK(c.model.lambda_s == 10.0);
  CHECK(c.model.lambda_a == 1.0);
  CHECK(c.train.adam.lr == 1e-4);
  CHECK(c.train.adam.weight_decay == 0.00015);
  CHECK(c.train.adam.beta1 == 0.9);
  CHECK(c.train.adam.beta2 == 0.999);
  CHECK(c.train.adam.eps == 1e-8);
  CHECK(c.paths.checkpoint == "c.otf");
}

TEST_CASE("config: JSON round trip is exact") {
  auto j = minimal();
  j["model"] = {{"depth", 3}, {"encoder_channels", {8, 16, 32}}, {"input_size", 64}, {"use_mdsa", false}};
  j["data"] = {{"image_size", 64}, {"n_samples", 8}, {"seed", 99}, {"noise_sigma", 0.0}};
  j["train"] = {{"lr", 3e-3}, {"micro_batch_size", 2}, {"accumulation_steps", 4}, {"seed", 18446744073709551615ull}};
  const auto c = run_config_from_json(j);
  CHECK(c.model.decoder_channels == std::vector<std::int64_t>{32, 16, 8});
  CHECK_FALSE(c.model.use_mdsa);
  CHECK(c.train.seed == 18446744073709551615ull);
  const auto again = run_config_from_json(to_json(c));
  CHECK(again.model == c.model);
  CHECK(again.data == c.data);
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("config: unknown keys are rejected with their location") {
  auto j = minimal();
  j["model"]["kk"] = 3;
  CHECK(message_of(j).find("model: unknown key 'kk'") != std::string::npos);
  j = minimal();
  j["extra"] = 1;
  CHECK(message_of(j).find("unknown key 'extra'") != std::string::npos);
  j = minimal();
  j["paths"]["logs"] = "x";
  CHECK(message_of(j).find("paths: unknown key 'logs'") != std::string::npos);
}

TEST_CASE("config: wrong types and missing sections") {
  auto j = minimal();
  j["train"]["lr"] = "fast";
  CHECK(message_of(j).find("train.lr: wrong type") != std::string::npos);
  j = minimal();
  j["model"]["depth"] = 2.5;
  CHECK_FALSE(message_of(j).empty());
  j = minimal();
  j.erase("paths");
  CHECK(message_of(j).find("paths: required") != std::string::npos);
  j = minimal();
  j["paths"].erase("checkpoint");
  CHECK(message_of(j).find("paths.checkpoint: required") != std::string::npos);
  j = minimal();
  j["model"] = json::array();
  CHECK(message_of(j).find("expected a JSON object") != std::string::npos);
  j = minimal();
  j["data"]["levels"] = {0.1, 0.5};
  CHECK(message_of(j).find("data.levels") != std::string::npos);
}

TEST_CASE("config: semantic violations surface as config errors") {
  auto j = minimal();
  j["model"]["encoder_channels"] = {64, 100, 256, 512, 1024};
  CHECK(message_of(j).find("double") != std::string::npos);
  j = minimal();
  j["data"]["image_size"] = 256;
  CHECK(message_of(j).find("must equal model.input_size") != std::string::npos);
  j = minimal();
  j["model"]["out_channels"] = 3;
  CHECK_FALSE(message_of(j).empty());
  j = minimal();
  j["train"]["threshold"] = 1.0;
  CHECK(message_of(j).find("threshold") != std::string::npos);
  j = minimal();
  j["train"]["weight_decay"] = -1.0;
  CHECK_FALSE(message_of(j).empty());
  j = minimal();
  j["model"]["input_size"] = 48;
  j["data"]["image_size"] = 48;
  CHECK(message_of(j).find("power of two") != std::string::npos);
}

TEST_CASE("config: files are read and errors name the file") {
  const auto dir = omega::testing::scratch_dir("config_files");
  CHECK_THROWS_WITH_AS(load_run_config(dir / "none.json"), doctest::Contains("none.json"), ConfigError);
  std::ofstream(dir / "bad.json") << "{\"model\": ";
  CHECK_THROWS_WITH_AS(load_run_config(dir / "bad.json"), doctest::Contains("invalid JSON"), ConfigError);
  auto j = minimal();
  j["train"]["epochs"] = -1;
  std::ofstream(dir / "neg.json") << j.dump();
  CHECK_THROWS_WITH_AS(load_run_config(dir / "neg.json"), doctest::Contains("neg.json"), ConfigError);
  std::ofstream(dir / "ok.json") << minimal().dump();
  CHECK(load_run_config(dir / "ok.json").model.input_size == 512);
}

TEST_CASE("config: shipped configs load") {
  const auto dir = std::filesystem::path(OMEGA_SOURCE_DIR) / "configs";
  const auto toy = load_run_config(dir / "toy.json");
  CHECK(toy.model.depth == 3);
  CHECK(toy.model.input_size == 64);
  const auto paper = load_run_config(dir / "paper.json");
  CHECK(paper.model == ModelConfig{});
  CHECK(paper.train.adam.weight_decay == 0.00015);
}
