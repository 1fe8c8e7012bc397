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

#include "dfsd/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dfsd/autograd.hpp"

namespace dfsd {

double grad_check(const ScalarFn& f, std::span<const Tensor> point, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grad_check: step must be positive");

  std::vector<Tensor> leaves;
  leaves.reserve(point.size());
  for (const auto& t : point) {
    leaves.push_back(Tensor::from_values(t.shape(), {t.values().begin(), t.values().end()}, true));
  }
  const GradMap grads = backward(f(leaves));

  std::vector<Tensor> probe;
  probe.reserve(point.size());
  for (const auto& t : point) probe.push_back(t.clone());

  NoGradGuard no_grad;
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const Tensor analytic = grads.grad(leaves[i]);
    auto values = probe[i].mutable_values();
    for (std::size_t c = 0; c < values.size(); ++c) {
      const double saved = values[c];
      values[c] = saved + h;
      const double up = f(probe).item();
      values[c] = saved - h;
      const double down = f(probe).item();
      values[c] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.values()[c];
      const double denom = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace dfsd
