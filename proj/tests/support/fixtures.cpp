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

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "dfsd/ops.hpp"

namespace dfsd::testing {

std::vector<double> normal_values(std::size_t n, Rng& rng, double std) {
  std::normal_distribution<double> normal(0.0, std);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

Tensor random_tensor(const Shape& shape, Rng& rng, double std, bool requires_grad) {
  return Tensor::from_values(shape, normal_values(shape_numel(shape), rng, std), requires_grad);
}

Tensor uniform_tensor(const Shape& shape, Rng& rng, double lo, double hi, bool requires_grad) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = u(rng);
  return Tensor::from_values(shape, std::move(v), requires_grad);
}

Tensor Probe::operator()(const Tensor& out) const { return ops::sum_all(ops::mul(out, weights_)); }

AffineLayer random_affine(std::size_t in, std::size_t out, Rng& rng, double std) {
  return {random_tensor({in, out}, rng, std, true), random_tensor({out}, rng, std, true)};
}

AffineLayer identity_affine(std::size_t dim) {
  std::vector<double> w(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) w[i * dim + i] = 1.0;
  return {Tensor::from_values({dim, dim}, std::move(w), true), Tensor::zeros({dim}, true)};
}

AffineLayer zero_affine(std::size_t in, std::size_t out) {
  return {Tensor::zeros({in, out}, true), Tensor::zeros({out}, true)};
}

ModelConfig tiny_model_config(std::size_t d_model) {
  ModelConfig c;
  c.raw_dims = {3, 4, 5};
  c.d_model = d_model;
  return c;
}

Model generic_model(const ModelConfig& config, std::uint64_t seed) {
  ModelConfig c = config;
  c.init_std = 0.5;
  Model model = Model::create(c, seed);
  // Biases start at zero; give them generic values too.
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (const auto& [name, leaf] : model.params()) {
    if (name.ends_with(".bias")) set_values(leaf, normal_values(leaf.numel(), rng, 0.3));
  }
  return model;
}

SynthConfig tiny_synth_config(std::uint64_t seed) {
  SynthConfig c;
  c.n_train = 96;
  c.n_val = 32;
  c.n_test = 32;
  c.seq_len = 3;
  c.raw_dims = {5, 4, 6};
  c.latent_dim = 4;
  c.seed = seed;
  return c;
}

void set_values(const Tensor& leaf, const std::vector<double>& values) {
  Tensor handle = leaf;
  auto dst = handle.mutable_values();
  std::copy(values.begin(), values.end(), dst.begin());
}

void fill(const Tensor& leaf, double value) {
  Tensor handle = leaf;
  auto dst = handle.mutable_values();
  std::fill(dst.begin(), dst.end(), value);
}

bool bit_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  const auto x = a.values();
  const auto y = b.values();
  return std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

}  // namespace dfsd::testing
