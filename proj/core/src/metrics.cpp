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

#include "dfsd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dfsd/error.hpp"

namespace dfsd {

namespace {

bool positive_class(double v, AccRule rule) { return rule == AccRule::positive ? v > 0.0 : v >= 0.0; }

Tensor missing_text(const Batch& batch, const AblationSpec& ablation) {
  return ablation.use_sim_text ? batch.sim_text : Tensor::zeros(batch.sim_text.shape());
}

FlowOutputs run_mode(const Batch& batch, const Model& model, EvalMode mode, const AblationSpec& ablation) {
  if (mode == EvalMode::complete) return run_flow(batch.real, model, false);
  const ModalityTensors inputs = {batch.real[index(Modality::audio)], batch.real[index(Modality::vision)],
                                  missing_text(batch, ablation)};
  return run_flow(inputs, model, ablation.use_mia);
}

}  // namespace

Metrics compute_metrics(std::span<const double> labels, std::span<const double> predictions, AccRule rule) {
  if (labels.size() != predictions.size()) throw ShapeError("compute_metrics: label/prediction count mismatch");
  if (labels.empty()) throw std::invalid_argument("compute_metrics: no samples");
  double abs_err = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    abs_err += std::abs(labels[i] - predictions[i]);
    hits += positive_class(labels[i], rule) == positive_class(predictions[i], rule);
  }
  const double n = static_cast<double>(labels.size());
  return {abs_err / n, 100.0 * static_cast<double>(hits) / n};
}

Evaluation evaluate(const Dataset& data, const Model& model, EvalMode mode, const AblationSpec& ablation,
                    AccRule rule, std::size_t batch_size) {
  NoGradGuard no_grad;
  Evaluation out;
  out.predictions.reserve(data.size());
  for (const auto& idx : batch_order(data.size(), std::max<std::size_t>(1, batch_size), std::nullopt)) {
    const auto flow = run_mode(make_batch(data, idx), model, mode, ablation);
    const auto p = flow.prediction.values();
    out.predictions.insert(out.predictions.end(), p.begin(), p.end());
  }
  out.metrics = compute_metrics(data.labels, out.predictions, rule);
  return out;
}

PerformanceGap performance_gap(const Metrics& complete, const Metrics& missing) {
  return {std::abs(missing.mae - complete.mae), std::abs(complete.acc - missing.acc)};
}

FlowRepresentations flow_representations(const Dataset& data, const Model& model, const AblationSpec& ablation,
                                         std::size_t batch_size) {
  NoGradGuard no_grad;
  FlowRepresentations out;
  out.dim = model.config().d_model;
  for (const auto& idx : batch_order(data.size(), std::max<std::size_t>(1, batch_size), std::nullopt)) {
    const Batch batch = make_batch(data, idx);
    const Tensor ra = run_mode(batch, model, EvalMode::complete, ablation).stage2.final_rep;
    const Tensor rb = run_mode(batch, model, EvalMode::missing, ablation).stage2.final_rep;
    const auto a = ra.values();
    const auto b = rb.values();
    out.complete.insert(out.complete.end(), a.begin(), a.end());
    out.missing.insert(out.missing.end(), b.begin(), b.end());
  }
  return out;
}

SimilarityMatrix similarity_matrix(const Dataset& data, const Model& model, const AblationSpec& ablation) {
  const auto reps = flow_representations(data, model, ablation);
  const std::size_t n = data.size();
  const std::size_t d = reps.dim;
  SimilarityMatrix sim;
  sim.n = n;
  sim.order.resize(n);
  std::iota(sim.order.begin(), sim.order.end(), std::size_t{0});
  std::stable_sort(sim.order.begin(), sim.order.end(),
                   [&](std::size_t a, std::size_t b) { return data.labels[a] < data.labels[b]; });
  sim.sorted_labels.reserve(n);
  for (auto i : sim.order) sim.sorted_labels.push_back(data.labels[i]);
  sim.distances.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ri = reps.complete.data() + sim.order[i] * d;
    for (std::size_t j = 0; j < n; ++j) {
      const double* rj = reps.missing.data() + sim.order[j] * d;
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += (ri[k] - rj[k]) * (ri[k] - rj[k]);
      sim.distances[i * n + j] = std::sqrt(s);
    }
  }
  return sim;
}

std::string SimilarityMatrix::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17) << "label";
  for (double y : sorted_labels) os << ',' << y;
  os << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    os << sorted_labels[i];
    for (std::size_t j = 0; j < n; ++j) os << ',' << at(i, j);
    os << '\n';
  }
  return os.str();
}

namespace {

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("spearman: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("spearman: need at least two values");
  return pearson(average_ranks(a), average_ranks(b));
}

double label_distance_correlation(const SimilarityMatrix& sim) {
  std::vector<double> label_gap(sim.n * sim.n);
  for (std::size_t i = 0; i < sim.n; ++i) {
    for (std::size_t j = 0; j < sim.n; ++j) {
      label_gap[i * sim.n + j] = std::abs(sim.sorted_labels[i] - sim.sorted_labels[j]);
    }
  }
  return spearman(sim.distances, label_gap);
}

}  // namespace dfsd
