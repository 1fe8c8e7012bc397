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

#include <filesystem>
#include <string>
#include <vector>

#include "dfsd/model.hpp"
#include "dfsd/synth_data.hpp"
#include "dfsd/train.hpp"

namespace dfsd {

/// Effective settings of one run. Sections: synth, model, loss, train, eval,
/// ablation. The model's raw input dims always follow the synth section.
struct RunConfig {
  SynthConfig synth;
  ModelConfig model;
  TrainConfig train;  // carries the loss weights and accuracy rule
  AblationSpec ablation;

  bool operator==(const RunConfig& other) const;
};

/// Parses JSON text, applies `section.key=value` overrides, fills defaults and
/// validates. Empty or whitespace-only text gives all defaults. Throws
/// ConfigError with line info on parse errors and naming unknown keys.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {});

/// Reads `path` (IoError if unreadable) then parse_config.
RunConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Fully resolved config as pretty-printed JSON.
std::string config_to_json(const RunConfig& config);

/// Writes `<dir>/config.json`.
void echo_config(const RunConfig& config, const std::filesystem::path& dir);

}  // namespace dfsd
