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

#include <span>
#include <string>
#include <vector>

#include "dfsd/train.hpp"

namespace dfsd {

enum class EvalMode { complete, missing };

struct Metrics {
  double mae = 0.0;
  double acc = 0.0;  // percent
};

struct Evaluation {
  Metrics metrics;
  std::vector<double> predictions;
};

/// MAE = mean |y - y_hat|; ACC = percentage of samples whose predicted class
/// (y_hat above/at zero per `rule`) matches the label's.
Metrics compute_metrics(std::span<const double> labels, std::span<const double> predictions, AccRule rule);

/// Complete mode runs the real-text flow, missing mode the simulated-text
/// flow with MIA per `ablation`. Runs without recording gradients.
Evaluation evaluate(const Dataset& data, const Model& model, EvalMode mode, const AblationSpec& ablation,
                    AccRule rule = AccRule::positive, std::size_t batch_size = 256);

struct PerformanceGap {
  double mae = 0.0;
  double acc = 0.0;
};

/// |MAE_missing - MAE_complete| and |ACC_complete - ACC_missing|.
PerformanceGap performance_gap(const Metrics& complete, const Metrics& missing);

/// Final representations of both flows for every sample, row-major [n x D].
struct FlowRepresentations {
  std::size_t dim = 0;
  std::vector<double> complete;
  std::vector<double> missing;
};

FlowRepresentations flow_representations(const Dataset& data, const Model& model, const AblationSpec& ablation,
                                         std::size_t batch_size = 256);

/// entry(i, j) = ||r_i(complete) - r_j(missing)||_2 with samples sorted by label.
struct SimilarityMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> order;     // dataset index of each sorted position
  std::vector<double> sorted_labels;  // ascending
  std::vector<double> distances;      // row-major n x n

  double at(std::size_t i, std::size_t j) const { return distances[i * n + j]; }
  /// First row and first column hold the sorted labels.
  std::string to_csv() const;
};

SimilarityMatrix similarity_matrix(const Dataset& data, const Model& model, const AblationSpec& ablation);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

/// Spearman correlation between matrix entries and |y_i - y_j|.
double label_distance_correlation(const SimilarityMatrix& sim);

}  // namespace dfsd
