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

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfsd/metrics.hpp"

namespace dfsd {

struct AblationRun {
  AblationSpec spec;
  std::size_t seed_index = 0;
  std::uint64_t seed = 0;
  Metrics missing;
  Metrics complete;
};

struct AblationRow {
  AblationSpec spec;
  Metrics missing;   // means over seeds
  Metrics complete;
  std::vector<AblationRun> runs;
};

/// The seven rows of the component ablation, full model last.
std::vector<AblationSpec> default_ablation_specs();

/// Training seed of seed index k: base + k. Specs share seeds so every row
/// sees the same initialisations.
std::uint64_t ablation_seed(std::uint64_t base_seed, std::size_t seed_index);

struct AblationOptions {
  std::size_t n_seeds = 1;
  std::size_t jobs = 1;
  /// When set, each finished run is appended to `<dir>/runs.csv`.
  std::optional<std::filesystem::path> out_dir;
};

/// Trains every spec for every seed and evaluates on `data.test` in both modes.
std::vector<AblationRow> run_ablation(const DatasetSplits& data, const ModelConfig& model_config,
                                      const TrainConfig& base, std::span<const AblationSpec> specs,
                                      const AblationOptions& options);

/// Header: LLM_g,MIA,L_MKD,L_RS,L_RNC,wo_text_MAE,wo_text_ACC,w_gt_MAE,w_gt_ACC
std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace dfsd
