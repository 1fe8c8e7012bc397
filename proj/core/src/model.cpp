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

#include "dfsd/model.hpp"

#include <cmath>
#include <string>

#include "dfsd/error.hpp"

namespace dfsd {

std::string_view modality_name(Modality m) {
  switch (m) {
    case Modality::audio:
      return "audio";
    case Modality::vision:
      return "vision";
    case Modality::text:
      return "text";
  }
  return "?";
}

double ModelConfig::attention_temperature() const {
  return tau_attn > 0.0 ? tau_attn : std::sqrt(static_cast<double>(d_model));
}

void ModelConfig::validate() const {
  for (std::size_t i = 0; i < raw_dims.size(); ++i) {
    if (raw_dims[i] == 0) {
      throw ConfigError("model: raw dim for " + std::string(modality_name(kModalities[i])) + " must be positive");
    }
  }
  if (d_model == 0) throw ConfigError("model: d_model must be positive");
  if (tau_attn < 0.0 || !std::isfinite(tau_attn)) throw ConfigError("model: tau_attn must be >= 0 (0 = sqrt(D))");
  if (!(init_std > 0.0)) throw ConfigError("model: init_std must be positive");
  if (mia_hidden() >= 3 * d_model) throw ConfigError("model: d_mia_hidden must be smaller than 3 * d_model");
}

namespace {

void push_affine(std::vector<ParamSpec>& specs, const std::string& prefix, std::size_t in, std::size_t out) {
  specs.push_back({prefix + ".weight", {in, out}, ParamKind::weight});
  specs.push_back({prefix + ".bias", {out}, ParamKind::bias});
}

Mlp bind_mlp(const ParamStore& store, const std::string& prefix, std::vector<Activation> acts) {
  Mlp mlp;
  for (std::size_t i = 0; i < acts.size(); ++i) mlp.layers.push_back(store.affine(prefix + "." + std::to_string(i)));
  mlp.activations = std::move(acts);
  return mlp;
}

}  // namespace

std::vector<ParamSpec> model_param_specs(const ModelConfig& config) {
  config.validate();
  const std::size_t d = config.d_model;
  std::vector<ParamSpec> specs;
  for (Modality m : kModalities) {
    const std::string name(modality_name(m));
    push_affine(specs, "proj." + name + ".0", config.raw_dims[index(m)], d);
    specs.push_back({"query." + name, {1, d}, ParamKind::query});
    for (const char* stage : {"stage1", "stage2"}) {
      push_affine(specs, std::string(stage) + "." + name + ".value", d, d);
      push_affine(specs, std::string(stage) + "." + name + ".key", d, d);
    }
  }
  for (const char* afg : {"afg1", "afg2"}) {
    push_affine(specs, std::string(afg) + ".0", 3 * d, config.afg_width());
    push_affine(specs, std::string(afg) + ".1", config.afg_width(), 3);
  }
  push_affine(specs, "head.0", d, 1);
  for (const char* mia : {"mia1", "mia2"}) {
    push_affine(specs, std::string(mia) + ".encoder", 3 * d, config.mia_hidden());
    push_affine(specs, std::string(mia) + ".decoder", config.mia_hidden(), d);
  }
  return specs;
}

Model Model::create(const ModelConfig& config, std::uint64_t seed) {
  const auto specs = model_param_specs(config);
  return bind(config, init_params(specs, seed, config.init_std));
}

Model Model::bind(const ModelConfig& config, ParamStore params) {
  for (const auto& spec : model_param_specs(config)) {
    if (!params.contains(spec.name)) throw ShapeError("model: missing parameter '" + spec.name + "'");
    if (params.at(spec.name).shape() != spec.shape) {
      throw ShapeError("model: parameter '" + spec.name + "' has shape " + shape_str(params.at(spec.name).shape()) +
                       ", expected " + shape_str(spec.shape));
    }
  }
  Model model;
  model.config_ = config;
  model.params_ = std::move(params);
  const auto& store = model.params_;
  auto& u = model.umca_;
  for (Modality m : kModalities) {
    const std::string name(modality_name(m));
    u.projection[index(m)] = bind_mlp(store, "proj." + name, {Activation::identity});
    u.query[index(m)] = store.at("query." + name);
    u.stage1[index(m)] = {store.affine("stage1." + name + ".value"), store.affine("stage1." + name + ".key")};
    u.stage2[index(m)] = {store.affine("stage2." + name + ".value"), store.affine("stage2." + name + ".key")};
  }
  u.afg1 = bind_mlp(store, "afg1", {Activation::tanh, Activation::identity});
  u.afg2 = bind_mlp(store, "afg2", {Activation::tanh, Activation::identity});
  u.head = bind_mlp(store, "head", {Activation::identity});
  u.tau_attn = config.attention_temperature();
  model.mia1_ = {store.affine("mia1.encoder"), store.affine("mia1.decoder")};
  model.mia2_ = {store.affine("mia2.encoder"), store.affine("mia2.decoder")};
  return model;
}

}  // namespace dfsd
