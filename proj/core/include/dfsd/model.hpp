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

#include <algorithm>
#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "dfsd/nn.hpp"

namespace dfsd {

enum class Modality : std::size_t { audio = 0, vision = 1, text = 2 };

inline constexpr std::array<Modality, 3> kModalities = {Modality::audio, Modality::vision, Modality::text};
inline constexpr std::size_t kNumModalities = 3;
/// Rows of the multi-view query: a, v, t, av, at, vt, avt.
inline constexpr std::size_t kNumViews = 7;

using ModalityTensors = std::array<Tensor, kNumModalities>;

constexpr std::size_t index(Modality m) { return static_cast<std::size_t>(m); }
std::string_view modality_name(Modality m);

struct ModelConfig {
  std::array<std::size_t, 3> raw_dims = {20, 16, 24};  // audio, vision, text
  std::size_t d_model = 32;
  std::size_t d_mia_hidden = 0;  // 0 -> d_model / 2
  std::size_t afg_hidden = 0;    // 0 -> d_model
  double tau_attn = 0.0;         // 0 -> sqrt(d_model)
  double init_std = 0.02;

  std::size_t mia_hidden() const { return d_mia_hidden ? d_mia_hidden : std::max<std::size_t>(1, d_model / 2); }
  std::size_t afg_width() const { return afg_hidden ? afg_hidden : d_model; }
  double attention_temperature() const;
  /// Throws ConfigError on non-positive dims, negative temperature or a MIA
  /// bottleneck that is not smaller than the concatenated input.
  void validate() const;
};

/// Value and key maps of one cross-attention block: V = E Wv + bv, K = tanh(V Wk + bk).
struct AttentionMaps {
  AffineLayer value;
  AffineLayer key;
};

struct UmcaParams {
  std::array<Mlp, 3> projection;
  std::array<Tensor, 3> query;  // [1 x D] each
  std::array<AttentionMaps, 3> stage1;
  std::array<AttentionMaps, 3> stage2;
  Mlp afg1;  // 3D -> hidden -> 3
  Mlp afg2;
  Mlp head;  // D -> 1
  double tau_attn = 1.0;
};

/// Residual autoencoder weights: encoder [3D x D'], decoder [D' x D].
struct MiaParams {
  AffineLayer encoder;
  AffineLayer decoder;
};

std::vector<ParamSpec> model_param_specs(const ModelConfig& config);

/// Parameter store plus typed views onto it. Views share storage with the
/// store, so optimizer updates are visible through both.
class Model {
 public:
  static Model create(const ModelConfig& config, std::uint64_t seed);
  /// Binds views onto an existing store (e.g. one loaded from disk).
  static Model bind(const ModelConfig& config, ParamStore params);

  Model(Model&&) = default;
  Model& operator=(Model&&) = default;
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  Model clone() const { return bind(config_, params_.clone()); }

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const UmcaParams& umca() const { return umca_; }
  const MiaParams& mia1() const { return mia1_; }
  const MiaParams& mia2() const { return mia2_; }

 private:
  Model() = default;

  ModelConfig config_;
  ParamStore params_;
  UmcaParams umca_;
  MiaParams mia1_;
  MiaParams mia2_;
};

}  // namespace dfsd
