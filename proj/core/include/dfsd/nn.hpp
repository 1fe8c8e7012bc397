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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dfsd/autograd.hpp"
#include "dfsd/tensor.hpp"

namespace dfsd {

enum class Activation { identity, tanh, relu };

/// y = x W + b over the last axis; W is [in x out], b is [out].
struct AffineLayer {
  Tensor weight;
  Tensor bias;

  std::size_t in_dim() const { return weight.dim(0); }
  std::size_t out_dim() const { return weight.dim(1); }
};

Tensor affine_forward(const AffineLayer& layer, const Tensor& x);

struct Mlp {
  std::vector<AffineLayer> layers;
  std::vector<Activation> activations;  // one per layer
};

Tensor mlp_forward(const Mlp& mlp, const Tensor& x);

enum class ParamKind { weight, bias, query };

struct ParamSpec {
  std::string name;
  Shape shape;
  ParamKind kind = ParamKind::weight;
};

/// Named parameter leaves. Iteration order is lexicographic by name.
class ParamStore {
 public:
  void add(const std::string& name, Tensor leaf);
  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  std::size_t size() const { return params_.size(); }
  std::size_t total_elements() const;
  std::vector<std::string> names() const;

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  /// Deep copy into fresh leaves (new identities).
  ParamStore clone() const;
  /// Overwrites values in place, keeping identities. Names and shapes must match.
  void assign_values(const ParamStore& other);

  AffineLayer affine(const std::string& prefix) const;

 private:
  std::map<std::string, Tensor> params_;
};

/// Weights and queries ~ N(0, std^2), biases zero. Deterministic per seed.
ParamStore init_params(std::span<const ParamSpec> specs, std::uint64_t seed, double std = 0.02);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::map<std::string, std::vector<double>> first_moment;
  std::map<std::string, std::vector<double>> second_moment;

  static AdamState create(const ParamStore& params, AdamConfig config);
};

/// One bias-corrected Adam update. Parameters missing from `grads` get a zero
/// gradient. Throws NumericError naming the parameter if any gradient is
/// non-finite; nothing is modified in that case.
void optimizer_step(AdamState& state, ParamStore& params, const GradMap& grads);

}  // namespace dfsd
