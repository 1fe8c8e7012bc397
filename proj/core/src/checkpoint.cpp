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

#include <string>

#include "archive.hpp"
#include "dfsd/error.hpp"
#include "dfsd/train.hpp"
#include "json_convert.hpp"

namespace dfsd {

namespace {

constexpr const char* kFormat = "dfsd-checkpoint";

archive::NamedArray moment_array(const Shape& shape, const std::vector<double>& values) {
  return {shape, values};
}

std::vector<double> take_values(archive::ArrayMap& arrays, const std::string& key, std::size_t expected) {
  auto it = arrays.find(key);
  if (it == arrays.end()) throw IoError("checkpoint: missing tensor '" + key + "'");
  if (it->second.values.size() != expected) throw IoError("checkpoint: tensor '" + key + "' has the wrong size");
  return std::move(it->second.values);
}

}  // namespace

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& dir) {
  archive::ArrayMap arrays;
  for (const auto& [name, leaf] : checkpoint.model.params()) {
    const auto values = leaf.values();
    arrays["param." + name] = {leaf.shape(), {values.begin(), values.end()}};
    const auto m = checkpoint.optimizer.first_moment.find(name);
    const auto v = checkpoint.optimizer.second_moment.find(name);
    if (m != checkpoint.optimizer.first_moment.end()) arrays["adam_m." + name] = moment_array(leaf.shape(), m->second);
    if (v != checkpoint.optimizer.second_moment.end()) arrays["adam_v." + name] = moment_array(leaf.shape(), v->second);
  }

  const auto& mc = checkpoint.model.config();
  const auto& adam = checkpoint.optimizer;
  archive::json meta;
  meta["format"] = kFormat;
  meta["epoch"] = checkpoint.epoch;
  meta["best_val_mae"] = checkpoint.best_val_mae;
  meta["adam"] = {{"step", adam.step},
                  {"lr", adam.config.lr},
                  {"beta1", adam.config.beta1},
                  {"beta2", adam.config.beta2},
                  {"eps", adam.config.eps}};
  // Exact model config, unresolved defaults included, so bind() sees the same shapes.
  meta["model"] = {{"raw_dims", mc.raw_dims},
                   {"d_model", mc.d_model},
                   {"d_mia_hidden", mc.d_mia_hidden},
                   {"afg_hidden", mc.afg_hidden},
                   {"tau_attn", mc.tau_attn},
                   {"init_std", mc.init_std}};
  meta["train"] = jsonio::to_json(checkpoint.train);
  meta["loss"] = jsonio::to_json(checkpoint.train.weights);
  meta["eval"] = jsonio::eval_to_json(checkpoint.train.acc_rule);
  meta["ablation"] = jsonio::to_json(checkpoint.ablation);
  meta["config_echo"] = checkpoint.config_echo;
  archive::write_dir(dir, std::move(meta), arrays);
}

Checkpoint load_checkpoint(const std::filesystem::path& dir) {
  auto loaded = archive::read_dir(dir, kFormat);
  const auto& meta = loaded.meta;
  try {
    ModelConfig mc;
    const auto& jm = meta.at("model");
    mc.raw_dims = jm.at("raw_dims").get<std::array<std::size_t, 3>>();
    mc.d_model = jm.at("d_model").get<std::size_t>();
    mc.d_mia_hidden = jm.at("d_mia_hidden").get<std::size_t>();
    mc.afg_hidden = jm.at("afg_hidden").get<std::size_t>();
    mc.tau_attn = jm.at("tau_attn").get<double>();
    mc.init_std = jm.at("init_std").get<double>();
    mc.validate();

    ParamStore store;
    AdamState adam;
    const auto& ja = meta.at("adam");
    adam.step = ja.at("step").get<std::uint64_t>();
    adam.config = {ja.at("lr").get<double>(), ja.at("beta1").get<double>(), ja.at("beta2").get<double>(),
                   ja.at("eps").get<double>()};

    for (const auto& spec : model_param_specs(mc)) {
      const std::size_t n = shape_numel(spec.shape);
      store.add(spec.name, Tensor::from_values(spec.shape, take_values(loaded.arrays, "param." + spec.name, n), true));
      adam.first_moment[spec.name] = take_values(loaded.arrays, "adam_m." + spec.name, n);
      adam.second_moment[spec.name] = take_values(loaded.arrays, "adam_v." + spec.name, n);
    }

    TrainConfig train = jsonio::train_from_json(meta.at("train"));
    train.weights = jsonio::loss_from_json(meta.at("loss"));
    train.acc_rule = jsonio::eval_from_json(meta.at("eval"), train.acc_rule);

    return Checkpoint{Model::bind(mc, std::move(store)),
                      std::move(adam),
                      meta.at("epoch").get<std::size_t>(),
                      meta.at("best_val_mae").get<double>(),
                      train,
                      jsonio::ablation_from_json(meta.at("ablation")),
                      meta.value("config_echo", std::string{})};
  } catch (const archive::json::exception& e) {
    throw IoError("checkpoint " + dir.string() + ": malformed manifest: " + e.what());
  } catch (const ConfigError& e) {
    throw IoError("checkpoint " + dir.string() + ": " + e.what());
  }
}

}  // namespace dfsd
