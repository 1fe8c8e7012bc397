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

#include "dfsd/train.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include "dfsd/autograd.hpp"
#include "dfsd/error.hpp"
#include "dfsd/log.hpp"
#include "dfsd/metrics.hpp"
#include "dfsd/ops.hpp"
#include "seeding.hpp"

namespace dfsd {

std::string AblationSpec::tag() const {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!s.empty()) s += on ? '+' : '-';
    else if (!on) s += '-';
    s += name;
  };
  add(use_sim_text, "sim");
  add(use_mia, "mia");
  add(use_mkd, "mkd");
  add(use_rs, "rs");
  add(use_rnc, "rnc");
  return s;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (patience > epochs) throw ConfigError("train.patience must not exceed train.epochs");
  if (batch_size < 2) throw ConfigError("train.batch_size must be >= 2");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be positive");
  weights.validate();
}

namespace {

Tensor missing_text(const Batch& batch, const AblationSpec& ablation) {
  return ablation.use_sim_text ? batch.sim_text : Tensor::zeros(batch.sim_text.shape());
}

}  // namespace

DoubleFlow run_double_flow(const Batch& batch, const Model& model, const AblationSpec& ablation) {
  const ModalityTensors missing_inputs = {batch.real[index(Modality::audio)], batch.real[index(Modality::vision)],
                                          missing_text(batch, ablation)};
  return {run_flow(batch.real, model, false), run_flow(missing_inputs, model, ablation.use_mia)};
}

LossTerms compute_loss_terms(const DoubleFlow& flows, const Batch& batch, const AblationSpec& ablation,
                             const LossWeights& weights) {
  const auto& a = flows.complete;
  const auto& b = flows.missing;
  constexpr auto t = index(Modality::text);
  LossTerms terms;
  terms.task = ops::scale(
      ops::add(task_loss(batch.labels, a.prediction), task_loss(batch.labels, b.prediction)), 0.5);
  if (ablation.use_mkd) {
    terms.mkd1 = mkd_loss(a.stage1.reps[t], b.stage1.reps[t]);
    terms.mkd2 = mkd_loss(a.stage2.seq[t], b.stage2.seq[t]);
  }
  if (ablation.use_rs) terms.rs = rs_loss(a.stage2.final_rep, b.stage2.final_rep);
  if (ablation.use_rnc) {
    std::vector<double> labels = batch.label_values;
    labels.insert(labels.end(), batch.label_values.begin(), batch.label_values.end());
    terms.rnc = rnc_loss(ops::concat({a.stage2.final_rep, b.stage2.final_rep}, 0), labels, weights.tau_rnc);
  }
  return terms;
}

LossReport train_step(const Batch& batch, Model& model, AdamState& optimizer, const LossWeights& weights,
                      const AblationSpec& ablation) {
  const DoubleFlow flows = run_double_flow(batch, model, ablation);
  const LossTerms terms = compute_loss_terms(flows, batch, ablation, weights);
  const std::pair<const char*, const Tensor*> named[] = {
      {"task", &terms.task}, {"mkd1", &terms.mkd1}, {"mkd2", &terms.mkd2}, {"rs", &terms.rs}, {"rnc", &terms.rnc}};
  for (const auto& [name, term] : named) {
    if (term->defined() && !std::isfinite(term->item())) {
      throw NumericError(std::string("train_step: loss term '") + name + "' is not finite");
    }
  }
  const Tensor total = total_loss(terms, weights);
  optimizer_step(optimizer, model.params(), backward(total));
  return make_report(terms, total);
}

FitResult fit(const Dataset& train, const Dataset& val, const ModelConfig& model_config, const TrainConfig& config,
              const AblationSpec& ablation) {
  config.validate();
  if (train.size() == 0 || val.size() == 0) throw std::invalid_argument("fit: empty train or validation split");
  if (model_config.raw_dims != train.raw_dims || val.raw_dims != train.raw_dims) {
    throw ConfigError("fit: model raw dims do not match the dataset");
  }

  Model model = Model::create(model_config, config.seed);
  AdamState adam = AdamState::create(model.params(), AdamConfig{config.lr});

  FitResult result{Checkpoint{model.clone(), adam, 0, std::numeric_limits<double>::infinity(), config, ablation, {}},
                   {}};
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto batches = batch_order(train.size(), config.batch_size, seeding::derive(config.seed, 0x5eed, epoch));
    LossReport sum;
    for (const auto& idx : batches) {
      const LossReport r = train_step(make_batch(train, idx), model, adam, config.weights, ablation);
      sum.task += r.task;
      sum.mkd1 += r.mkd1;
      sum.mkd2 += r.mkd2;
      sum.rs += r.rs;
      sum.rnc += r.rnc;
      sum.total += r.total;
    }
    const double nb = static_cast<double>(batches.size());
    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = {sum.task / nb, sum.mkd1 / nb, sum.mkd2 / nb, sum.rs / nb, sum.rnc / nb, sum.total / nb};
    rec.val_mae_complete = evaluate(val, model, EvalMode::complete, ablation, config.acc_rule).metrics.mae;
    rec.val_mae_missing = evaluate(val, model, EvalMode::missing, ablation, config.acc_rule).metrics.mae;
    result.history.push_back(rec);

    std::ostringstream msg;
    msg << "epoch " << epoch << " loss " << rec.loss.total << " val_mae complete " << rec.val_mae_complete
        << " missing " << rec.val_mae_missing;
    log_debug(msg.str());

    if (rec.val_mae_complete < result.best.best_val_mae) {
      result.best.model = model.clone();
      result.best.optimizer = adam;
      result.best.epoch = epoch;
      result.best.best_val_mae = rec.val_mae_complete;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (since_best >= config.patience) break;
  }
  return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "epoch,task,mkd1,mkd2,rs,rnc,total,val_mae_complete,val_mae_missing\n";
  for (const auto& r : history) {
    os << r.epoch << ',' << r.loss.task << ',' << r.loss.mkd1 << ',' << r.loss.mkd2 << ',' << r.loss.rs << ','
       << r.loss.rnc << ',' << r.loss.total << ',' << r.val_mae_complete << ',' << r.val_mae_missing << '\n';
  }
  return os.str();
}

}  // namespace dfsd
