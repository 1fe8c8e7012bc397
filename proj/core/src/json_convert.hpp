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

// JSON mapping of the configuration structs. Readers are strict: unknown keys
// and wrongly typed values raise ConfigError naming "section.key".

#include <set>
#include <string>

#include <json.hpp>

#include "dfsd/error.hpp"
#include "dfsd/losses.hpp"
#include "dfsd/model.hpp"
#include "dfsd/synth_data.hpp"
#include "dfsd/train.hpp"

namespace dfsd::jsonio {

using json = nlohmann::json;

class StrictReader {
 public:
  StrictReader(const json& obj, std::string section) : obj_(obj), section_(std::move(section)) {
    if (!obj_.is_object()) throw ConfigError("section '" + section_ + "' must be an object");
  }

  template <class T>
  void field(const std::string& key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError("invalid value for '" + section_ + "." + key + "': " + it->dump());
    }
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_unsigned()) throw ConfigError("'" + section_ + "." + key + "' must be a non-negative integer");
    }
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key '" + section_ + "." + it.key() + "'");
    }
  }

 private:
  const json& obj_;
  std::string section_;
  std::set<std::string> seen_;
};

inline json to_json(const SynthConfig& c) {
  return {{"n_train", c.n_train},
          {"n_val", c.n_val},
          {"n_test", c.n_test},
          {"seq_len", c.seq_len},
          {"raw_audio", c.raw_dims[0]},
          {"raw_vision", c.raw_dims[1]},
          {"raw_text", c.raw_dims[2]},
          {"latent_dim", c.latent_dim},
          {"sigma_audio", c.noise_std[0]},
          {"sigma_vision", c.noise_std[1]},
          {"sigma_text", c.noise_std[2]},
          {"text_degradation", c.text_degradation},
          {"seed", c.seed}};
}

inline SynthConfig synth_from_json(const json& j, SynthConfig c = {}) {
  StrictReader r(j, "synth");
  r.field("n_train", c.n_train);
  r.field("n_val", c.n_val);
  r.field("n_test", c.n_test);
  r.field("seq_len", c.seq_len);
  r.field("raw_audio", c.raw_dims[0]);
  r.field("raw_vision", c.raw_dims[1]);
  r.field("raw_text", c.raw_dims[2]);
  r.field("latent_dim", c.latent_dim);
  r.field("sigma_audio", c.noise_std[0]);
  r.field("sigma_vision", c.noise_std[1]);
  r.field("sigma_text", c.noise_std[2]);
  r.field("text_degradation", c.text_degradation);
  r.field("seed", c.seed);
  r.finish();
  return c;
}

// Raw dims live with the data; the model section carries only network sizes.
inline json to_json(const ModelConfig& c) {
  return {{"d_model", c.d_model},
          {"d_mia_hidden", c.mia_hidden()},
          {"afg_hidden", c.afg_width()},
          {"tau_attn", c.attention_temperature()},
          {"init_std", c.init_std}};
}

inline ModelConfig model_from_json(const json& j, ModelConfig c = {}) {
  StrictReader r(j, "model");
  r.field("d_model", c.d_model);
  r.field("d_mia_hidden", c.d_mia_hidden);
  r.field("afg_hidden", c.afg_hidden);
  r.field("tau_attn", c.tau_attn);
  r.field("init_std", c.init_std);
  r.finish();
  return c;
}

inline json to_json(const LossWeights& w) {
  return {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}, {"delta", w.delta}, {"tau_rnc", w.tau_rnc}};
}

inline LossWeights loss_from_json(const json& j, LossWeights w = {}) {
  StrictReader r(j, "loss");
  r.field("alpha", w.alpha);
  r.field("beta", w.beta);
  r.field("gamma", w.gamma);
  r.field("delta", w.delta);
  r.field("tau_rnc", w.tau_rnc);
  r.finish();
  return w;
}

// Loss weights and the accuracy rule are stored in their own sections.
inline json to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs}, {"patience", c.patience}, {"batch_size", c.batch_size}, {"lr", c.lr}, {"seed", c.seed}};
}

inline TrainConfig train_from_json(const json& j, TrainConfig c = {}) {
  StrictReader r(j, "train");
  r.field("epochs", c.epochs);
  r.field("patience", c.patience);
  r.field("batch_size", c.batch_size);
  r.field("lr", c.lr);
  r.field("seed", c.seed);
  r.finish();
  return c;
}

inline std::string acc_rule_name(AccRule rule) { return rule == AccRule::positive ? "positive" : "non_negative"; }

inline AccRule acc_rule_from_name(const std::string& name) {
  if (name == "positive") return AccRule::positive;
  if (name == "non_negative") return AccRule::non_negative;
  throw ConfigError("eval.acc_rule must be 'positive' or 'non_negative', got '" + name + "'");
}

inline json eval_to_json(AccRule rule) { return {{"acc_rule", acc_rule_name(rule)}}; }

inline AccRule eval_from_json(const json& j, AccRule rule) {
  StrictReader r(j, "eval");
  std::string name = acc_rule_name(rule);
  r.field("acc_rule", name);
  r.finish();
  return acc_rule_from_name(name);
}

inline json to_json(const AblationSpec& a) {
  return {{"use_sim_text", a.use_sim_text},
          {"use_mia", a.use_mia},
          {"use_mkd", a.use_mkd},
          {"use_rs", a.use_rs},
          {"use_rnc", a.use_rnc}};
}

inline AblationSpec ablation_from_json(const json& j, AblationSpec a = {}) {
  StrictReader r(j, "ablation");
  r.field("use_sim_text", a.use_sim_text);
  r.field("use_mia", a.use_mia);
  r.field("use_mkd", a.use_mkd);
  r.field("use_rs", a.use_rs);
  r.field("use_rnc", a.use_rnc);
  r.finish();
  return a;
}

}  // namespace dfsd::jsonio
