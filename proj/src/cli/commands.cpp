// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "omega/checkpoint.hpp"
#include "omega/config.hpp"
#include "omega/dataset.hpp"
#include "omega/otf.hpp"
#include "omega/pgm.hpp"
#include "omega/trainer.hpp"
#include "omega/verify/suites.hpp"

namespace omega::cli {

namespace fs = std::filesystem;

namespace {

const char* channel_label(std::size_t c) { return c == 0 ? "organ" : c == 1 ? "tumor" : "other"; }

void print_metrics(std::ostream& out, const std::string& title, const train::MetricsReport& r) {
  out << title << '\n';
  out << "  channel       DSC      PPV    Sensi\n";
  auto row = [&](const std::string& name, double d, double p, double s) {
    out << "  " << std::left << std::setw(8) << name << std::right << std::fixed << std::setprecision(4)
        << std::setw(9) << d << std::setw(9) << p << std::setw(9) << s << '\n';
  };
  for (std::size_t c = 0; c < r.channels.size(); ++c) {
    const auto& m = r.channels[c];
    row(channel_label(c), m.dsc, m.ppv, m.sensitivity);
  }
  row("mean", r.mean_dsc, r.mean_ppv, r.mean_sensitivity);
  out << std::defaultfloat;
}

std::string metrics_csv(const train::MetricsReport& r) {
  std::ostringstream f;
  f.precision(9);
  f << "channel,label,dsc,ppv,sens,tp,fp,fn,tn\n";
  for (std::size_t c = 0; c < r.channels.size(); ++c) {
    const auto& m = r.channels[c];
    f << c << ',' << channel_label(c) << ',' << m.dsc << ',' << m.ppv << ',' << m.sensitivity << ',' << m.tp
      << ',' << m.fp << ',' << m.fn << ',' << m.tn << '\n';
  }
  f << "mean,mean," << r.mean_dsc << ',' << r.mean_ppv << ',' << r.mean_sensitivity << ",,,,\n";
  return f.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

// Rows of an earlier history CSV with step <= last_step, used when resuming.
std::vector<std::string> prior_rows(const fs::path& csv, std::int64_t last_step) {
  std::vector<std::string> rows;
  std::ifstream f(csv);
  std::string line;
  if (!f || !std::getline(f, line)) return rows;
  while (std::getline(f, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    if (std::stoll(line.substr(0, comma)) <= last_step) rows.push_back(line);
  }
  return rows;
}

std::vector<data::Sample> load_checked_split(const RunConfig& cfg, data::Split split) {
  const auto spec = data::manifest_spec(data::read_manifest(cfg.paths.data_dir));
  if (!(spec == cfg.data)) {
    throw ConfigError("dataset at " + cfg.paths.data_dir.string() +
                      " was generated from a different data section; rerun gen-data");
  }
  return data::load_split(cfg.paths.data_dir, split);
}

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

int cmd_gen_data(const Streams& io, const fs::path& config, fs::path out_dir, bool force) {
  const auto cfg = load_run_config(config);
  if (out_dir.empty()) out_dir = cfg.paths.data_dir;
  data::write_dataset(out_dir, cfg.data, force);
  const auto n = cfg.data.n_samples;
  io.out << "wrote " << n << " samples to " << out_dir.string() << " (train "
         << data::split_range(n, data::Split::kTrain).size() << ", val "
         << data::split_range(n, data::Split::kVal).size() << ", test "
         << data::split_range(n, data::Split::kTest).size() << ")\n";
  return kOk;
}

int cmd_train(const Streams& io, const fs::path& config, bool resume) {
  const auto cfg = load_run_config(config);
  const auto train_set = load_checked_split(cfg, data::Split::kTrain);
  const auto val_set = load_checked_split(cfg, data::Split::kVal);
  if (train_set.empty()) throw ConfigError("training split is empty; increase data.n_samples");

  std::optional<OmegaNet<float>> net;
  std::optional<train::AdamState<float>> state;
  std::vector<std::string> rows;
  if (resume) {
    auto ck = load_checkpoint(cfg.paths.checkpoint, &cfg.model, cfg.train.adam);
    if (!ck.optimizer) throw CheckpointError(cfg.paths.checkpoint.string() + ": no optimizer state to resume from");
    net.emplace(cfg.model, std::move(ck.params));
    state.emplace(std::move(*ck.optimizer));
    rows = prior_rows(cfg.paths.metrics_csv, state->step);
    io.out << "resuming from step " << state->step << '\n';
  } else {
    net.emplace(cfg.model, cfg.train.seed);
    state.emplace(train::AdamState<float>::zeros(net->parameters(), cfg.train.adam));
  }

  const auto channels = cfg.model.out_channels;
  const auto total = train::total_steps(static_cast<std::int64_t>(train_set.size()), cfg.train);
  auto flush = [&] {
    std::string text = train::history_csv_header(channels) + '\n';
    for (const auto& r : rows) text += r + '\n';
    write_text(cfg.paths.metrics_csv, text);
  };
  if (cfg.paths.checkpoint.has_parent_path()) fs::create_directories(cfg.paths.checkpoint.parent_path());

  train::TrainHooks hooks;
  hooks.on_step = [&](const train::HistoryEntry& e) {
    rows.push_back(train::history_csv_row(e, channels));
    if (e.metrics) {
      io.out << "step " << e.step << '/' << total << " loss " << std::setprecision(6) << e.loss;
      for (std::size_t c = 0; c < e.metrics->channels.size(); ++c) {
        io.out << ' ' << channel_label(c) << "_dsc " << std::setprecision(4) << e.metrics->channels[c].dsc;
      }
      io.out << std::setprecision(6) << '\n';
    }
  };
  hooks.checkpoint = [&](std::int64_t, const OmegaNet<float>& n, const train::AdamState<float>& s) {
    save_checkpoint(cfg.paths.checkpoint, n, &s);
    flush();
  };
  train::train(*net, *state, train_set, val_set, cfg.train, hooks);
  save_checkpoint(cfg.paths.checkpoint, *net, &*state);
  flush();

  const auto& report_set = val_set.empty() ? train_set : val_set;
  const auto ev = train::evaluate(*net, report_set, cfg.train.threshold, cfg.train.micro_batch_size);
  print_metrics(io.out, std::string("final metrics (") + (val_set.empty() ? "train" : "val") + " split)", ev.metrics);
  io.out << "checkpoint " << cfg.paths.checkpoint.string() << ", history " << cfg.paths.metrics_csv.string()
         << '\n';
  return kOk;
}

int cmd_eval(const Streams& io, const fs::path& config, fs::path checkpoint, const std::string& split_arg,
             const fs::path& csv_out) {
  const auto cfg = load_run_config(config);
  data::Split split;
  try {
    split = data::parse_split(split_arg);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (checkpoint.empty()) checkpoint = cfg.paths.checkpoint;
  auto ck = load_checkpoint(checkpoint, &cfg.model, cfg.train.adam);
  const OmegaNet<float> net(cfg.model, std::move(ck.params));
  const auto samples = load_checked_split(cfg, split);
  if (samples.empty()) throw ConfigError(std::string("split '") + data::split_name(split) + "' is empty");
  const auto ev = train::evaluate(net, samples, cfg.train.threshold, cfg.train.micro_batch_size);
  print_metrics(io.out, std::string(data::split_name(split)) + " split, " + std::to_string(samples.size()) +
                            " samples, loss " + std::to_string(ev.loss),
                ev.metrics);
  if (!csv_out.empty()) write_text(csv_out, metrics_csv(ev.metrics));
  return kOk;
}

int cmd_predict(const Streams& io, const fs::path& checkpoint, const fs::path& image, const fs::path& out,
                double threshold) {
  if (!(threshold > 0 && threshold < 1)) throw ConfigError("--threshold must lie in (0, 1)");
  auto ck = load_checkpoint(checkpoint);
  const OmegaNet<float> net(ck.config, std::move(ck.params));
  const auto img = data::load_image(image);
  const auto s = net.config().input_size;
  if (img.dim(1) != s || img.dim(2) != s) {
    throw ShapeError("image " + image.string() + " is " + shape_str(img.shape()) + ", model expects 1×" +
                     std::to_string(s) + "×" + std::to_string(s));
  }
  const auto prob = train::predict_probabilities(net, img.reshaped({1, 1, s, s}));
  const auto l = net.config().out_channels;
  const auto p = prob.reshaped({l, s, s});
  Tensor<float> mask(p.shape());
  for (std::size_t i = 0; i < p.numel(); ++i) mask[i] = train::is_positive(p[i], threshold) ? 1.0f : 0.0f;
  const fs::path prob_path = fs::path(out.string() + ".prob.otf");
  const fs::path mask_path = fs::path(out.string() + ".mask.pgm");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  data::write_otf(prob_path, {{"prob", p}});
  data::write_mask_pgm(mask_path, mask);
  io.out << "wrote " << prob_path.string() << " and " << mask_path.string() << '\n';
  return kOk;
}

int cmd_verify(const Streams& io, const std::string& suite, std::uint64_t seed, std::size_t instances) {
  std::vector<verify::SuiteReport> reports;
  if (suite == "grad" || suite == "all") reports.push_back(verify::run_grad_suite(seed));
  if (suite == "oracle" || suite == "all") reports.push_back(verify::run_oracle_suite(instances, seed));
  if (suite == "shape" || suite == "all") reports.push_back(verify::run_shape_suite());
  if (reports.empty()) throw ConfigError("unknown suite '" + suite + "' (grad, oracle, shape, all)");
  bool ok = true;
  for (const auto& r : reports) {
    verify::print_report(io.out, r);
    ok = ok && r.passed();
  }
  return ok ? kOk : kFailure;
}

int guarded(const Streams& io, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const data::DatasetError& e) {
    io.err << "dataset error: " << e.what() << '\n';
    return kConfig;
  } catch (const train::DivergenceError& e) {
    io.err << "training diverged: " << e.what() << '\n';
    return kDivergence;
  } catch (const CheckpointError& e) {
    io.err << "checkpoint error: " << e.what() << '\n';
    return kCheckpoint;
  } catch (const data::OtfError& e) {
    io.err << "tensor file error: " << e.what() << '\n';
    return kCheckpoint;
  } catch (const ShapeError& e) {
    io.err << "shape error: " << e.what() << '\n';
    return kCheckpoint;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"omega: dual-supervised attention U-Net for small-object segmentation", "omega"};
  app.require_subcommand(1);

  fs::path config, out_dir, checkpoint, image, pred_out, csv_out;
  bool force = false, resume = false;
  std::string split = "val", suite;
  std::uint64_t seed = 1;
  std::size_t instances = 100;
  double threshold = 0.5;

  auto* gen = app.add_subcommand("gen-data", "Generate the synthetic dataset");
  gen->add_option("--config", config, "Run config (JSON)")->required();
  gen->add_option("--out", out_dir, "Output directory (default: paths.data_dir)");
  gen->add_flag("--force", force, "Overwrite an existing dataset");

  auto* tr = app.add_subcommand("train", "Train and write checkpoint + metrics CSV");
  tr->add_option("--config", config, "Run config (JSON)")->required();
  tr->add_flag("--resume", resume, "Continue from paths.checkpoint");

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  ev->add_option("--config", config, "Run config (JSON)")->required();
  ev->add_option("--checkpoint", checkpoint, "Checkpoint (default: paths.checkpoint)");
  ev->add_option("--split", split, "train, val or test")->capture_default_str();
  ev->add_option("--csv", csv_out, "Also write the metrics as CSV");

  auto* pr = app.add_subcommand("predict", "Segment one image");
  pr->add_option("--checkpoint", checkpoint, "Checkpoint")->required();
  pr->add_option("--image", image, "Image (.otf holding 1×H×W, or .pgm)")->required();
  pr->add_option("--out", pred_out, "Output stem: writes <out>.prob.otf and <out>.mask.pgm")->required();
  pr->add_option("--threshold", threshold, "Binarization threshold")->capture_default_str();

  auto* ve = app.add_subcommand("verify", "Run self-verification suites");
  ve->add_option("--suite", suite, "grad, oracle, shape or all")->required();
  ve->add_option("--seed", seed, "Random seed")->capture_default_str();
  ve->add_option("--instances", instances, "Random instances per oracle check")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    if (const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) {
      err << "run '" << (sub == &app ? "omega" : "omega " + sub->get_name()) << " --help' for usage\n";
    }
    return kConfig;
  }

  const Streams io{out, err};
  return guarded(io, [&] {
    if (*gen) return cmd_gen_data(io, config, out_dir, force);
    if (*tr) return cmd_train(io, config, resume);
    if (*ev) return cmd_eval(io, config, checkpoint, split, csv_out);
    if (*pr) return cmd_predict(io, checkpoint, image, pred_out, threshold);
    return cmd_verify(io, suite, seed, instances);
  });
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace omega::cli
