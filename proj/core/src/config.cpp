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

#include "dfsd/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "archive.hpp"
#include "dfsd/error.hpp"
#include "json_convert.hpp"

namespace dfsd {

using jsonio::json;

bool RunConfig::operator==(const RunConfig& other) const { return config_to_json(*this) == config_to_json(other); }

namespace {

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

// Byte offset -> 1-based line number.
std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

void apply_override(json& root, const std::string& item) {
  const auto eq = item.find('=');
  const auto dot = item.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq || dot == 0 || dot + 1 == eq) {
    throw ConfigError("override must look like section.key=value, got '" + item + "'");
  }
  const std::string section = item.substr(0, dot);
  const std::string key = item.substr(dot + 1, eq - dot - 1);
  const std::string raw = item.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;  // bare words are strings
  if (!root.contains(section)) root[section] = json::object();
  if (!root[section].is_object()) throw ConfigError("section '" + section + "' must be an object");
  root[section][key] = std::move(value);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  json root = json::object();
  if (!trimmed(text).empty()) {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("config parse error at line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object of sections");
  for (const auto& item : overrides) apply_override(root, item);

  static const char* const kSections[] = {"synth", "model", "loss", "train", "eval", "ablation"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (std::find(std::begin(kSections), std::end(kSections), it.key()) == std::end(kSections)) {
      throw ConfigError("unknown section '" + it.key() + "'");
    }
  }
  auto section = [&](const char* name) { return root.contains(name) ? root[name] : json::object(); };

  RunConfig cfg;
  cfg.synth = jsonio::synth_from_json(section("synth"));
  cfg.model = jsonio::model_from_json(section("model"));
  cfg.model.raw_dims = cfg.synth.raw_dims;
  cfg.train = jsonio::train_from_json(section("train"));
  cfg.train.weights = jsonio::loss_from_json(section("loss"));
  cfg.train.acc_rule = jsonio::eval_from_json(section("eval"), cfg.train.acc_rule);
  cfg.ablation = jsonio::ablation_from_json(section("ablation"));

  cfg.synth.validate();
  cfg.model.validate();
  cfg.train.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

std::string config_to_json(const RunConfig& c) {
  json root;
  root["synth"] = jsonio::to_json(c.synth);
  root["model"] = jsonio::to_json(c.model);
  root["loss"] = jsonio::to_json(c.train.weights);
  root["train"] = jsonio::to_json(c.train);
  root["eval"] = jsonio::eval_to_json(c.train.acc_rule);
  root["ablation"] = jsonio::to_json(c.ablation);
  return root.dump(2) + "\n";
}

void echo_config(const RunConfig& config, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  archive::write_text(dir / "config.json", config_to_json(config));
}

}  // namespace dfsd
