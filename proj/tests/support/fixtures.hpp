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

// Shared helpers for unit and acceptance tests.

#include <cstdint>
#include <random>
#include <vector>

#include "dfsd/model.hpp"
#include "dfsd/nn.hpp"
#include "dfsd/synth_data.hpp"
#include "dfsd/tensor.hpp"

namespace dfsd::testing {

using Rng = std::mt19937_64;

std::vector<double> normal_values(std::size_t n, Rng& rng, double std = 1.0);
Tensor random_tensor(const Shape& shape, Rng& rng, double std = 1.0, bool requires_grad = false);
/// Entries uniform in [lo, hi].
Tensor uniform_tensor(const Shape& shape, Rng& rng, double lo, double hi, bool requires_grad = false);

/// Reduces a tensor to a scalar through fixed random weights, so grad checks
/// see a generic upstream gradient instead of all-ones.
class Probe {
 public:
  Probe(const Shape& shape, Rng& rng) : weights_(random_tensor(shape, rng)) {}
  Tensor operator()(const Tensor& out) const;

 private:
  Tensor weights_;
};

AffineLayer random_affine(std::size_t in, std::size_t out, Rng& rng, double std = 0.5);
AffineLayer identity_affine(std::size_t dim);
AffineLayer zero_affine(std::size_t in, std::size_t out);

/// Small network for structural tests: raw dims {3, 4, 5}, D = d_model.
ModelConfig tiny_model_config(std::size_t d_model = 4);
/// Parameters drawn with a large std so every path carries a visible gradient.
Model generic_model(const ModelConfig& config, std::uint64_t seed);

SynthConfig tiny_synth_config(std::uint64_t seed = 7);

/// Overwrites a leaf's values in place.
void set_values(const Tensor& leaf, const std::vector<double>& values);
void fill(const Tensor& leaf, double value);

bool bit_equal(const Tensor& a, const Tensor& b);
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace dfsd::testing
