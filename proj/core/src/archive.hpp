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

// Directory of raw little-endian float64 tensors described by manifest.json.
// Shared by dataset and checkpoint persistence; not part of the public API.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dfsd/tensor.hpp"

namespace dfsd::archive {

using json = nlohmann::json;

struct NamedArray {
  Shape shape;
  std::vector<double> values;
};

using ArrayMap = std::map<std::string, NamedArray>;

inline constexpr const char* kManifest = "manifest.json";

/// Writes every array to `<name>.bin` and a manifest holding `meta` plus a
/// "tensors" list (name, file, shape, bytes).
void write_dir(const std::filesystem::path& dir, json meta, const ArrayMap& arrays);

struct Loaded {
  json meta;
  ArrayMap arrays;
};

/// Reads and validates a directory written by write_dir. `format` must match
/// meta["format"]. Throws IoError naming the offending tensor or field.
Loaded read_dir(const std::filesystem::path& dir, const std::string& format);

json read_json(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace dfsd::archive
