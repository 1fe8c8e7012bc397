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

#include "dfsd/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dfsd/error.hpp"
#include "dfsd/ops.hpp"

namespace dfsd {

void LossWeights::validate() const {
  const double w[] = {alpha, beta, gamma, delta};
  const char* names[] = {"alpha", "beta", "gamma", "delta"};
  for (int i = 0; i < 4; ++i) {
    if (!(w[i] >= 0.0) || !std::isfinite(w[i])) {
      throw ConfigError(std::string("loss weight ") + names[i] + " must be finite and non-negative");
    }
  }
  if (!(tau_rnc > 0.0) || !std::isfinite(tau_rnc)) throw ConfigError("loss: tau_rnc must be positive");
}

namespace {

Tensor rmse(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes differ: " + shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
  return ops::sqrt(ops::mean_all(ops::square(ops::sub(a, b))));
}

}  // namespace

Tensor task_loss(const Tensor& labels, const Tensor& predictions) {
  if (labels.shape() != predictions.shape()) {
    throw ShapeError("task_loss: labels " + shape_str(labels.shape()) + " vs predictions " +
                     shape_str(predictions.shape()));
  }
  return ops::mean_all(ops::square(ops::sub(labels, predictions)));
}

Tensor mkd_loss(const Tensor& real, const Tensor& simulated) {
  return rmse("mkd_loss", ops::detach(real), simulated);
}

Tensor rs_loss(const Tensor& complete, const Tensor& missing) { return rmse("rs_loss", complete, missing); }

Tensor rnc_loss(const Tensor& reps, std::span<const double> labels, double tau) {
  if (!(tau > 0.0)) throw DomainError("rnc_loss: temperature must be positive");
  if (reps.rank() != 2) throw ShapeError("rnc_loss: reps must be [M x D], got " + shape_str(reps.shape()));
  const std::size_t m = reps.dim(0);
  const std::size_t d = reps.dim(1);
  if (m < 2) throw ShapeError("rnc_loss: need at least 2 representations, got " + std::to_string(m));
  if (labels.size() != m) {
    throw ShapeError("rnc_loss: " + std::to_string(labels.size()) + " labels for " + std::to_string(m) + " reps");
  }

  // Pairwise distances and logits s_ij / tau = -d_ij / tau.
  const Tensor diff = ops::sub(ops::reshape(reps, {m, 1, d}), ops::reshape(reps, {1, m, d}));
  const Tensor dist = ops::sqrt(ops::sum(ops::square(diff), -1));
  const Tensor logits = ops::scale(dist, -1.0 / tau);

  // Per-pair log-sum-exp over S_ij: shift by the max member logit (a
  // constant) and push non-members far below so exp() gives exactly 0.
  // Row j == i uses k != i so its discarded log stays finite.
  constexpr double kExcluded = -1e300;
  const auto lv = logits.values();
  std::vector<double> bias(m * m * m, kExcluded);
  std::vector<double> shift(m * m, -INFINITY);
  std::vector<double> pairs(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (j != i) pairs[i * m + j] = 1.0;
      const double dij = std::abs(labels[i] - labels[j]);
      for (std::size_t k = 0; k < m; ++k) {
        if (k == i) continue;
        if (j == i || std::abs(labels[i] - labels[k]) >= dij) {
          bias[(i * m + j) * m + k] = 0.0;
          shift[i * m + j] = std::max(shift[i * m + j], lv[i * m + k]);
        }
      }
    }
  }
  const Tensor c = Tensor::from_values({m, m, 1}, shift);
  const Tensor member_logits = ops::add(ops::reshape(logits, {m, 1, m}), Tensor::from_values({m, m, m}, std::move(bias)));
  const Tensor denom = ops::sum(ops::exp(ops::sub(member_logits, c)), -1);
  const Tensor log_ratio =
      ops::sub(ops::sub(logits, Tensor::from_values({m, m}, std::move(shift))), ops::log(denom));
  const Tensor masked = ops::mul(log_ratio, Tensor::from_values({m, m}, std::move(pairs)));
  return ops::scale(ops::sum_all(masked), -1.0 / static_cast<double>(m * (m - 1)));
}

Tensor total_loss(const LossTerms& terms, const LossWeights& weights) {
  weights.validate();
  if (!terms.task.defined()) throw std::invalid_argument("total_loss: task term is required");
  Tensor total = terms.task;
  const std::pair<const Tensor*, double> extra[] = {
      {&terms.mkd1, weights.alpha}, {&terms.mkd2, weights.beta}, {&terms.rs, weights.gamma}, {&terms.rnc, weights.delta}};
  for (const auto& [term, w] : extra) {
    if (!term->defined() || w == 0.0) continue;
    if (term->numel() != 1) throw ShapeError("total_loss: component is not scalar");
    total = ops::add(total, ops::scale(*term, w));
  }
  return total;
}

LossReport make_report(const LossTerms& terms, const Tensor& total) {
  auto value = [](const Tensor& t) { return t.defined() ? t.item() : 0.0; };
  return {value(terms.task), value(terms.mkd1), value(terms.mkd2), value(terms.rs), value(terms.rnc), total.item()};
}

}  // namespace dfsd
