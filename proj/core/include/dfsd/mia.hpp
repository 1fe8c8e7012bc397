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

#include "dfsd/model.hpp"

namespace dfsd {

/// Which imagination autoencoders rewrite the simulated text representation.
/// Active only in the text-missing flow.
struct MiaGate {
  const MiaParams* stage1 = nullptr;
  const MiaParams* stage2 = nullptr;

  bool active() const { return stage1 != nullptr; }

  static MiaGate off() { return {}; }
  static MiaGate on(const MiaParams& mia1, const MiaParams& mia2) { return {&mia1, &mia2}; }
  static MiaGate on(const Model& model) { return on(model.mia1(), model.mia2()); }
};

/// Residual text imagination, applied row-wise with shared weights:
///   H   = tanh(cat(R_v, R_a, R_t_hat) W1 + b1)
///   out = R_t_hat + tanh(H W2 + b2)
/// All three inputs share shape [..., S', D].
Tensor mia_forward(const Tensor& vision, const Tensor& audio, const Tensor& text_hat, const MiaParams& params);

}  // namespace dfsd
