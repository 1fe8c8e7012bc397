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

#include "archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "dfsd/error.hpp"

namespace dfsd::archive {

namespace fs = std::filesystem;

namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return __builtin_bswap64(v);
  }
}

std::vector<char> encode(const std::vector<double>& values) {
  std::vector<char> bytes(values.size() * sizeof(double));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto u = to_le(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(bytes.data() + i * sizeof(double), &u, sizeof u);
  }
  return bytes;
}

std::vector<double> decode(const std::vector<char>& bytes) {
  std::vector<double> values(bytes.size() / sizeof(double));
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t u;
    std::memcpy(&u, bytes.data() + i * sizeof(double), sizeof u);
    values[i] = std::bit_cast<double>(to_le(u));
  }
  return values;
}

}  // namespace

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + file.string());
}

json read_json(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(file.string() + ": " + e.what());
  }
}

void write_dir(const fs::path& dir, json meta, const ArrayMap& arrays) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  json tensors = json::array();
  for (const auto& [name, arr] : arrays) {
    if (shape_numel(arr.shape) != arr.values.size()) {
      throw IoError("archive: tensor '" + name + "' shape " + shape_str(arr.shape) + " does not match its values");
    }
    const std::string file = name + ".bin";
    const auto bytes = encode(arr.values);
    std::ofstream out(dir / file, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write tensor '" + name + "' to " + (dir / file).string());
    tensors.push_back({{"name", name}, {"file", file}, {"shape", arr.shape}, {"bytes", bytes.size()}});
  }
  meta["dtype"] = "float64-le";
  meta["tensors"] = std::move(tensors);
  write_text(dir / kManifest, meta.dump(2) + "\n");
}

Loaded read_dir(const fs::path& dir, const std::string& format) {
  Loaded out;
  out.meta = read_json(dir / kManifest);
  auto& meta = out.meta;
  if (!meta.is_object() || meta.value("format", std::string()) != format) {
    throw IoError(dir.string() + ": manifest format is not '" + format + "'");
  }
  if (!meta.contains("tensors") || !meta["tensors"].is_array()) {
    throw IoError(dir.string() + ": manifest has no tensor list");
  }
  for (const auto& entry : meta["tensors"]) {
    std::string name;
    Shape shape;
    std::string file;
    std::size_t bytes = 0;
    try {
      name = entry.at("name").get<std::string>();
      file = entry.at("file").get<std::string>();
      shape = entry.at("shape").get<Shape>();
      bytes = entry.at("bytes").get<std::size_t>();
    } catch (const json::exception& e) {
      throw IoError(dir.string() + ": malformed tensor entry: " + e.what());
    }
    if (shape.empty() || shape_numel(shape) * sizeof(double) != bytes) {
      throw IoError("tensor '" + name + "': manifest shape " + shape_str(shape) + " disagrees with byte length " +
                    std::to_string(bytes));
    }
    std::ifstream in(dir / file, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("tensor '" + name + "': cannot open " + (dir / file).string());
    const auto size = static_cast<std::size_t>(in.tellg());
    if (size != bytes) {
      throw IoError("tensor '" + name + "': file holds " + std::to_string(size) + " bytes, manifest says " +
                    std::to_string(bytes));
    }
    in.seekg(0);
    std::vector<char> raw(bytes);
    in.read(raw.data(), static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("tensor '" + name + "': short read");
    out.arrays.emplace(name, NamedArray{shape, decode(raw)});
  }
  return out;
}

}  // namespace dfsd::archive
