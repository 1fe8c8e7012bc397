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

#include "dfsd/nn.hpp"

#include <cmath>
#include <random>

#include "dfsd/error.hpp"
#include "dfsd/ops.hpp"

namespace dfsd {

Tensor affine_forward(const AffineLayer& layer, const Tensor& x) {
  if (x.dim(-1) != layer.in_dim()) {
    throw ShapeError("affine: input " + shape_str(x.shape()) + " does not match weight " +
                     shape_str(layer.weight.shape()));
  }
  return ops::add(ops::matmul(x, layer.weight), layer.bias);
}

Tensor mlp_forward(const Mlp& mlp, const Tensor& x) {
  if (mlp.layers.size() != mlp.activations.size()) {
    throw ShapeError("mlp: " + std::to_string(mlp.layers.size()) + " layers but " +
                     std::to_string(mlp.activations.size()) + " activations");
  }
  Tensor h = x;
  for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
    h = affine_forward(mlp.layers[i], h);
    switch (mlp.activations[i]) {
      case Activation::identity:
        break;
      case Activation::tanh:
        h = ops::tanh(h);
        break;
      case Activation::relu:
        h = ops::relu(h);
        break;
    }
  }
  return h;
}

void ParamStore::add(const std::string& name, Tensor leaf) {
  if (!params_.emplace(name, std::move(leaf)).second) {
    throw std::invalid_argument("ParamStore: duplicate parameter '" + name + "'");
  }
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::out_of_range("ParamStore: no parameter '" + name + "'");
  return it->second;
}

std::size_t ParamStore::total_elements() const {
  std::size_t n = 0;
  for (const auto& [_, t] : params_) n += t.numel();
  return n;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

ParamStore ParamStore::clone() const {
  ParamStore copy;
  for (const auto& [name, t] : params_) {
    copy.add(name, Tensor::from_values(t.shape(), {t.values().begin(), t.values().end()}, true));
  }
  return copy;
}

void ParamStore::assign_values(const ParamStore& other) {
  if (other.size() != size()) throw std::invalid_argument("ParamStore: parameter count differs");
  for (auto& [name, t] : params_) {
    const Tensor& src = other.at(name);
    if (src.shape() != t.shape()) {
      throw ShapeError("ParamStore: shape of '" + name + "' differs: " + shape_str(src.shape()) +
                       " vs " + shape_str(t.shape()));
    }
    auto dst = t.mutable_values();
    std::copy(src.values().begin(), src.values().end(), dst.begin());
  }
}

AffineLayer ParamStore::affine(const std::string& prefix) const {
  return AffineLayer{at(prefix + ".weight"), at(prefix + ".bias")};
}

ParamStore init_params(std::span<const ParamSpec> specs, std::uint64_t seed, double std) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std);
  ParamStore store;
  for (const auto& spec : specs) {
    for (auto d : spec.shape) {
      if (d == 0) throw ShapeError("init_params: zero dimension in '" + spec.name + "'");
    }
    std::vector<double> values(shape_numel(spec.shape), 0.0);
    if (spec.kind != ParamKind::bias) {
      for (auto& v : values) v = normal(rng);
    }
    store.add(spec.name, Tensor::from_values(spec.shape, std::move(values), true));
  }
  return store;
}

AdamState AdamState::create(const ParamStore& params, AdamConfig config) {
  AdamState s;
  s.config = config;
  for (const auto& [name, t] : params) {
    s.first_moment.emplace(name, std::vector<double>(t.numel(), 0.0));
    s.second_moment.emplace(name, std::vector<double>(t.numel(), 0.0));
  }
  return s;
}

void optimizer_step(AdamState& state, ParamStore& params, const GradMap& grads) {
  for (const auto& [name, t] : params) {
    if (const auto* g = grads.find(t)) {
      for (double v : g->values()) {
        if (!std::isfinite(v)) throw NumericError("optimizer_step: non-finite gradient for '" + name + "'");
      }
    }
  }
  const auto& c = state.config;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (const auto& [name, t] : params) {
    const auto* g = grads.find(t);
    auto& m = state.first_moment.at(name);
    auto& v = state.second_moment.at(name);
    Tensor handle = t;
    auto w = handle.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g ? g->values()[i] : 0.0;
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * gi;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * gi * gi;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      w[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
  }
}

}  // namespace dfsd
