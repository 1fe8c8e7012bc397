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

#include "dfsd/ablation.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "dfsd/error.hpp"
#include "dfsd/log.hpp"

namespace dfsd {

std::vector<AblationSpec> default_ablation_specs() {
  // LLM_g, MIA, MKD, RS, RNC
  return {
      {false, true, true, true, true},   //
      {true, false, false, true, true},  //
      {true, false, true, true, true},   //
      {true, true, false, true, true},   //
      {true, true, true, false, true},   //
      {true, true, true, true, false},   //
      {true, true, true, true, true},
  };
}

std::uint64_t ablation_seed(std::uint64_t base_seed, std::size_t seed_index) { return base_seed + seed_index; }

namespace {

std::string run_line(const AblationRun& r) {
  std::ostringstream os;
  os << std::setprecision(17) << r.spec.tag() << ',' << r.seed << ',' << r.missing.mae << ',' << r.missing.acc << ','
     << r.complete.mae << ',' << r.complete.acc << '\n';
  return os.str();
}

}  // namespace

std::vector<AblationRow> run_ablation(const DatasetSplits& data, const ModelConfig& model_config,
                                      const TrainConfig& base, std::span<const AblationSpec> specs,
                                      const AblationOptions& options) {
  if (options.n_seeds == 0) throw ConfigError("ablation: seeds must be >= 1");
  base.validate();

  const std::size_t total = specs.size() * options.n_seeds;
  std::vector<AblationRun> runs(total);
  std::mutex io_mutex;
  std::ofstream runs_csv;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    const auto path = *options.out_dir / "runs.csv";
    const bool fresh = !std::filesystem::exists(path);
    runs_csv.open(path, std::ios::app);
    if (!runs_csv) throw IoError("cannot open " + path.string());
    if (fresh) runs_csv << "spec,seed,wo_text_MAE,wo_text_ACC,w_gt_MAE,w_gt_ACC\n" << std::flush;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      try {
        AblationRun run;
        run.spec = specs[k / options.n_seeds];
        run.seed_index = k % options.n_seeds;
        run.seed = ablation_seed(base.seed, run.seed_index);
        TrainConfig cfg = base;
        cfg.seed = run.seed;
        const auto fitted = fit(data.train, data.val, model_config, cfg, run.spec);
        const Model& model = fitted.best.model;
        run.missing = evaluate(data.test, model, EvalMode::missing, run.spec, cfg.acc_rule).metrics;
        run.complete = evaluate(data.test, model, EvalMode::complete, run.spec, cfg.acc_rule).metrics;
        std::lock_guard lock(io_mutex);
        runs[k] = run;
        if (runs_csv.is_open()) runs_csv << run_line(run) << std::flush;
        log_info("ablation " + run.spec.tag() + " seed " + std::to_string(run.seed) + " done");
      } catch (...) {
        std::lock_guard lock(io_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, total));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < jobs; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<AblationRow> rows;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    AblationRow row;
    row.spec = specs[s];
    for (std::size_t k = 0; k < options.n_seeds; ++k) {
      const auto& r = runs[s * options.n_seeds + k];
      row.missing.mae += r.missing.mae;
      row.missing.acc += r.missing.acc;
      row.complete.mae += r.complete.mae;
      row.complete.acc += r.complete.acc;
      row.runs.push_back(r);
    }
    const double n = static_cast<double>(options.n_seeds);
    row.missing = {row.missing.mae / n, row.missing.acc / n};
    row.complete = {row.complete.mae / n, row.complete.acc / n};
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << std::setprecision(17) << "LLM_g,MIA,L_MKD,L_RS,L_RNC,wo_text_MAE,wo_text_ACC,w_gt_MAE,w_gt_ACC\n";
  for (const auto& r : rows) {
    const auto& s = r.spec;
    os << s.use_sim_text << ',' << s.use_mia << ',' << s.use_mkd << ',' << s.use_rs << ',' << s.use_rnc << ','
       << r.missing.mae << ',' << r.missing.acc << ',' << r.complete.mae << ',' << r.complete.acc << '\n';
  }
  return os.str();
}

}  // namespace dfsd
