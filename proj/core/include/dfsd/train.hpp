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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dfsd/losses.hpp"
#include "dfsd/model.hpp"
#include "dfsd/nn.hpp"
#include "dfsd/synth_data.hpp"
#include "dfsd/umca.hpp"

namespace dfsd {

/// Component toggles of one ablation row.
struct AblationSpec {
  bool use_sim_text = true;  // off: the missing flow gets zero text features
  bool use_mia = true;
  bool use_mkd = true;
  bool use_rs = true;
  bool use_rnc = true;

  bool operator==(const AblationSpec&) const = default;
  /// Compact tag such as "sim+mia+mkd+rs+rnc" or "sim-mia-mkd+rs+rnc".
  std::string tag() const;
};

/// Accuracy convention: which labels count as the positive class.
enum class AccRule { positive, non_negative };

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t patience = 8;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  LossWeights weights;
  AccRule acc_rule = AccRule::positive;

  /// Throws ConfigError: epochs >= 1, patience <= epochs, batch_size >= 2, lr > 0.
  void validate() const;
};

struct DoubleFlow {
  FlowOutputs complete;  // real text, MIA off
  FlowOutputs missing;   // simulated (or zeroed) text, MIA per ablation
};

/// Runs both flows on shared parameters.
DoubleFlow run_double_flow(const Batch& batch, const Model& model, const AblationSpec& ablation);

/// Loss terms of one double-flow pass. Disabled terms stay undefined.
/// Task loss is the mean of the two flows' MSEs; RNC runs over the 2N
/// concatenated final reps with duplicated labels.
LossTerms compute_loss_terms(const DoubleFlow& flows, const Batch& batch, const AblationSpec& ablation,
                             const LossWeights& weights);

/// One forward/backward/Adam update. Throws NumericError naming the term when
/// a loss is not finite (parameters untouched).
LossReport train_step(const Batch& batch, Model& model, AdamState& optimizer, const LossWeights& weights,
                      const AblationSpec& ablation);

struct EpochRecord {
  std::size_t epoch = 0;
  LossReport loss;  // mean over batches
  double val_mae_complete = 0.0;
  double val_mae_missing = 0.0;
};

struct Checkpoint {
  Model model;
  AdamState optimizer;
  std::size_t epoch = 0;  // 1-based epoch the parameters come from
  double best_val_mae = 0.0;
  TrainConfig train;
  AblationSpec ablation;
  std::string config_echo;  // effective run config (JSON text), may be empty
};

struct FitResult {
  Checkpoint best;
  std::vector<EpochRecord> history;
};

/// Trains from a fresh model seeded with config.seed. Early-stops when the
/// complete-mode validation MAE has not improved for `patience` epochs and
/// returns the best checkpoint.
FitResult fit(const Dataset& train, const Dataset& val, const ModelConfig& model_config, const TrainConfig& config,
              const AblationSpec& ablation);

/// CSV with columns epoch,task,mkd1,mkd2,rs,rnc,total,val_mae_complete,val_mae_missing.
std::string history_csv(const std::vector<EpochRecord>& history);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& dir);
Checkpoint load_checkpoint(const std::filesystem::path& dir);

}  // namespace dfsd
