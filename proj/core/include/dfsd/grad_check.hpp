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

#include <functional>
#include <span>
#include <vector>

#include "dfsd/tensor.hpp"

namespace dfsd {

using ScalarFn = std::function<Tensor(std::span<const Tensor>)>;

/// Coordinates whose gradient magnitude is below this are compared on an
/// absolute scale of this size instead of relatively.
inline constexpr double kGradCheckFloor = 1e-3;

/// Maximum relative error between autodiff gradients and central differences
/// of `f` at `point`, over every coordinate of every input tensor:
///   |g_auto - g_fd| / max(|g_auto|, |g_fd|, kGradCheckFloor).
/// The inputs are not modified.
double grad_check(const ScalarFn& f, std::span<const Tensor> point, double h = 1e-5);

}  // namespace dfsd
