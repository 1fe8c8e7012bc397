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

#include "dfsd/mia.hpp"

#include "dfsd/error.hpp"
#include "dfsd/ops.hpp"

namespace dfsd {

Tensor mia_forward(const Tensor& vision, const Tensor& audio, const Tensor& text_hat, const MiaParams& params) {
  if (vision.shape() != audio.shape() || vision.shape() != text_hat.shape()) {
    throw ShapeError("mia_forward: inputs differ in shape: " + shape_str(vision.shape()) + ", " +
                     shape_str(audio.shape()) + ", " + shape_str(text_hat.shape()));
  }
  const Tensor joint = ops::concat({vision, audio, text_hat}, -1);
  const Tensor hidden = ops::tanh(affine_forward(params.encoder, joint));
  return ops::add(text_hat, ops::tanh(affine_forward(params.decoder, hidden)));
}

}  // namespace dfsd
