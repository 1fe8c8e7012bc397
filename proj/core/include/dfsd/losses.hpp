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

#include "dfsd/tensor.hpp"

namespace dfsd {

/// Weights of the combined objective and the RNC temperature. The MKD
/// weights are small because the teacher shares its encoder with the student:
/// at weight 1 the gap feeds on itself and training stalls within ~10 epochs.
struct LossWeights {
  double alpha = 0.01;  // MKD on stage-1 text reps
  double beta = 0.01;   // MKD on stage-2 text sequences
  double gamma = 1.0;  // representation similarity
  double delta = 0.1;  // rank-n-contrast
  double tau_rnc = 2.0;

  /// Throws ConfigError on negative or non-finite weights or tau_rnc <= 0.
  void validate() const;
};

struct LossReport {
  double task = 0.0;
  double mkd1 = 0.0;
  double mkd2 = 0.0;
  double rs = 0.0;
  double rnc = 0.0;
  double total = 0.0;
};

/// Mean squared error, (1/n) sum (y - y_hat)^2. Labels are constants.
Tensor task_loss(const Tensor& labels, const Tensor& predictions);

/// RMSE between a detached teacher and a student: sqrt(mean((stop(real) - sim)^2)).
/// Only `simulated` receives gradient.
Tensor mkd_loss(const Tensor& real, const Tensor& simulated);

/// RMSE between the two flows' final representations; both sides receive gradient.
Tensor rs_loss(const Tensor& complete, const Tensor& missing);

/// Rank-N-Contrast over the rows of `reps` [M x D] with M = 2N >= 2:
///   L = -1/(M(M-1)) sum_i sum_{j != i} log( exp(s_ij/tau) / sum_{k in S_ij} exp(s_ik/tau) )
/// where s_ij = -||r_i - r_j||_2 and S_ij = {k != i : |y_i - y_k| >= |y_i - y_j|}.
Tensor rnc_loss(const Tensor& reps, std::span<const double> labels, double tau);

struct LossTerms {
  Tensor task;
  Tensor mkd1;  // undefined tensors are skipped
  Tensor mkd2;
  Tensor rs;
  Tensor rnc;
};

/// task + alpha mkd1 + beta mkd2 + gamma rs + delta rnc. Terms with zero weight
/// are left off the graph.
Tensor total_loss(const LossTerms& terms, const LossWeights& weights);

/// Scalar values of every term plus the total.
LossReport make_report(const LossTerms& terms, const Tensor& total);

}  // namespace dfsd
