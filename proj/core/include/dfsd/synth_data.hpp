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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "dfsd/model.hpp"
#include "dfsd/tensor.hpp"

namespace dfsd {

/// Latent-factor generator settings. Every modality is a noisy linear image of
/// a shared latent z; text sees all of z with the least noise, audio and
/// vision see overlapping subsets.
struct SynthConfig {
  std::size_t n_train = 2000;
  std::size_t n_val = 500;
  std::size_t n_test = 500;
  std::size_t seq_len = 8;
  std::array<std::size_t, 3> raw_dims = {20, 16, 24};  // audio, vision, text
  std::size_t latent_dim = 8;
  std::array<double, 3> noise_std = {0.3, 0.4, 0.1};  // audio, vision, text
  double text_degradation = 0.5;                       // rho in [0, 1]
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  bool operator==(const SynthConfig&) const = default;
};

enum class Split { train, val, test };
std::string_view split_name(Split s);

struct Sample {
  std::vector<double> audio;     // [S x D_raw_a]
  std::vector<double> vision;    // [S x D_raw_v]
  std::vector<double> text;      // [S x D_raw_t], real text features
  std::vector<double> sim_text;  // [S x D_raw_t], simulated text features
  double label = 0.0;            // valence in [-3, 3]
};

/// One split, stored field-major: each feature array is [n x S x D_raw].
struct Dataset {
  Split split = Split::train;
  SynthConfig config;
  std::size_t seq_len = 0;
  std::array<std::size_t, 3> raw_dims{};
  std::vector<double> audio;
  std::vector<double> vision;
  std::vector<double> text;
  std::vector<double> sim_text;
  std::vector<double> labels;

  std::size_t size() const { return labels.size(); }
  std::size_t row_elements(Modality m) const { return seq_len * raw_dims[index(m)]; }
  std::span<const double> features(Modality m, std::size_t i) const;
  std::span<const double> simulated_text(std::size_t i) const;
  Sample sample(std::size_t i) const;

  bool operator==(const Dataset&) const = default;
};

struct DatasetSplits {
  Dataset train;
  Dataset val;
  Dataset test;

  bool operator==(const DatasetSplits&) const = default;
};

/// Stand-in for LLM-generated text features: a noisy, audio-contaminated blend
///   sim = (1 - rho) * text + rho * (eps + mean_rows(audio) * B),  eps ~ N(0, noise_std^2)
class TextDegrader {
 public:
  /// `mixing` is row-major [D_raw_a x D_raw_t].
  TextDegrader(std::size_t audio_dim, std::size_t text_dim, std::vector<double> mixing, double noise_std);

  /// Random mixing map ~ N(0, 1/D_raw_a), deterministic in `seed`.
  static TextDegrader random(std::size_t audio_dim, std::size_t text_dim, double noise_std, std::uint64_t seed);

  /// `text` is [S x D_t], `audio` is [S x D_a]. rho = 0 returns `text` unchanged.
  std::vector<double> degrade(std::span<const double> text, std::span<const double> audio, std::size_t seq_len,
                              double rho, std::uint64_t sample_seed) const;

 private:
  std::size_t audio_dim_;
  std::size_t text_dim_;
  std::vector<double> mixing_;
  double noise_std_;
};

/// Deterministic function of `config` (including its seed).
DatasetSplits generate_dataset(const SynthConfig& config);

/// Directory layout: manifest.json plus `<split>.<field>.bin` per split and
/// field (audio, vision, text, sim_text, labels), raw little-endian float64.
void save_dataset(const DatasetSplits& data, const std::filesystem::path& dir);
DatasetSplits load_dataset(const std::filesystem::path& dir);

/// Index partition of one epoch. Without a shuffle seed the order is 0..n-1.
/// The final short batch is kept.
std::vector<std::vector<std::size_t>> batch_order(std::size_t n, std::size_t batch_size,
                                                  std::optional<std::uint64_t> shuffle_seed);

struct Batch {
  ModalityTensors real;       // audio, vision, real text: [B x S x D_raw_m]
  Tensor sim_text;            // [B x S x D_raw_t]
  Tensor labels;              // [B]
  std::vector<double> label_values;
};

Batch make_batch(const Dataset& data, std::span<const std::size_t> indices);

}  // namespace dfsd
