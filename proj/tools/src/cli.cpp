// Copyright 2026 The dfsd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "dfsd/ablation.hpp"
#include "dfsd/config.hpp"
#include "dfsd/error.hpp"
#include "dfsd/log.hpp"
#include "dfsd/metrics.hpp"

namespace dfsd::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::string data;
  std::string checkpoint;
  std::string mode = "complete";
  std::string split = "test";
  std::size_t seeds = 1;
  std::size_t jobs = 1;
};

RunConfig effective_config(const Options& o) {
  return o.config.empty() ? parse_config("", o.overrides) : load_config(o.config, o.overrides);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw IoError("cannot write " + path.string());
}

const Dataset& pick_split(const DatasetSplits& data, const std::string& name) {
  if (name == "train") return data.train;
  if (name == "val") return data.val;
  if (name == "test") return data.test;
  throw ConfigError("--split must be train, val or test, got '" + name + "'");
}

EvalMode parse_mode(const std::string& name) {
  if (name == "complete") return EvalMode::complete;
  if (name == "missing") return EvalMode::missing;
  throw ConfigError("--mode must be complete or missing, got '" + name + "'");
}

// Accepts a run directory (holding checkpoint/) or the checkpoint itself.
Checkpoint open_checkpoint(const fs::path& path) {
  if (fs::exists(path / "checkpoint" / "manifest.json")) return load_checkpoint(path / "checkpoint");
  return load_checkpoint(path);
}

void check_dims(const Dataset& data, const ModelConfig& model) {
  if (data.raw_dims != model.raw_dims) throw ConfigError("dataset raw dims do not match the model");
}

int cmd_gen_data(const Options& o, std::ostream& out) {
  const RunConfig cfg = effective_config(o);
  const auto data = generate_dataset(cfg.synth);
  save_dataset(data, o.out);
  echo_config(cfg, o.out);
  out << "wrote " << data.train.size() << '/' << data.val.size() << '/' << data.test.size() << " samples to "
      << o.out << '\n';
  return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
  RunConfig cfg = effective_config(o);
  const auto data = load_dataset(o.data);
  cfg.model.raw_dims = data.train.raw_dims;
  auto result = fit(data.train, data.val, cfg.model, cfg.train, cfg.ablation);
  result.best.config_echo = config_to_json(cfg);

  const fs::path dir = o.out;
  fs::create_directories(dir);
  save_checkpoint(result.best, dir / "checkpoint");
  write_file(dir / "history.csv", history_csv(result.history));
  echo_config(cfg, dir);
  out << "best epoch " << result.best.epoch << " val_mae " << result.best.best_val_mae << '\n';
  return 0;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const EvalMode mode = parse_mode(o.mode);
  const Checkpoint ck = open_checkpoint(o.checkpoint);
  const auto data = load_dataset(o.data);
  const Dataset& split = pick_split(data, o.split);
  check_dims(split, ck.model.config());
  if (mode == EvalMode::missing && !ck.ablation.use_mia) {
    log_warning("missing-mode evaluation of a model trained without MIA");
  }
  const auto ev = evaluate(split, ck.model, mode, ck.ablation, ck.train.acc_rule);
  char line[96];
  std::snprintf(line, sizeof line, "MAE=%.6f ACC=%.4f", ev.metrics.mae, ev.metrics.acc);
  out << line << '\n';
  return 0;
}

int cmd_simmat(const Options& o, std::ostream& out) {
  const Checkpoint ck = open_checkpoint(o.checkpoint);
  const auto data = load_dataset(o.data);
  const Dataset& split = pick_split(data, o.split);
  check_dims(split, ck.model.config());
  const auto sim = similarity_matrix(split, ck.model, ck.ablation);

  const fs::path dir = o.out;
  fs::create_directories(dir);
  write_file(dir / "simmat.csv", sim.to_csv());
  if (!ck.config_echo.empty()) {
    write_file(dir / "config.json", ck.config_echo);
  }
  out << "spearman " << label_distance_correlation(sim) << '\n';
  return 0;
}

int cmd_ablate(const Options& o, std::ostream& out) {
  RunConfig cfg = effective_config(o);
  const DatasetSplits data = o.data.empty() ? generate_dataset(cfg.synth) : load_dataset(o.data);
  cfg.model.raw_dims = data.train.raw_dims;

  const fs::path dir = o.out;
  fs::create_directories(dir);
  echo_config(cfg, dir);
  const auto specs = default_ablation_specs();
  const auto rows = run_ablation(data, cfg.model, cfg.train, specs, {o.seeds, o.jobs, dir});
  const std::string csv = ablation_csv(rows);
  write_file(dir / "ablation.csv", csv);
  out << csv;
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Double-flow self-distillation experiments on synthetic multimodal data", "dfsd"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run config");
    sub->add_option("--set", o.overrides, "Override, section.key=value (repeatable)");
  };

  auto* gen = app.add_subcommand("gen-data", "Generate and save synthetic splits");
  add_config(gen);
  gen->add_option("--out", o.out, "Output dataset directory")->required();

  auto* train = app.add_subcommand("train", "Train on a saved dataset");
  add_config(train);
  train->add_option("--data", o.data, "Dataset directory")->required();
  train->add_option("--out", o.out, "Run output directory")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--checkpoint", o.checkpoint, "Run or checkpoint directory")->required();
  eval->add_option("--data", o.data, "Dataset directory")->required();
  eval->add_option("--mode", o.mode, "complete | missing");
  eval->add_option("--split", o.split, "train | val | test");

  auto* simmat = app.add_subcommand("simmat", "Export the cross-flow distance matrix");
  simmat->add_option("--checkpoint", o.checkpoint, "Run or checkpoint directory")->required();
  simmat->add_option("--data", o.data, "Dataset directory")->required();
  simmat->add_option("--out", o.out, "Output directory")->required();
  simmat->add_option("--split", o.split, "train | val | test");

  auto* ablate = app.add_subcommand("ablate", "Run the component ablation grid");
  add_config(ablate);
  ablate->add_option("--data", o.data, "Dataset directory (generated from config when omitted)");
  ablate->add_option("--out", o.out, "Output directory")->required();
  ablate->add_option("--seeds", o.seeds, "Seeds per row");
  ablate->add_option("--jobs", o.jobs, "Parallel runs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(o, out);
    if (train->parsed()) return cmd_train(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (simmat->parsed()) return cmd_simmat(o, out);
    return cmd_ablate(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dfsd::cli
