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

#include <vector>

#include "dfsd/tensor.hpp"

// Differentiable primitives. Every function returns a fresh tensor; results are
// recorded on the tape when an operand requires a gradient. Axes may be
// negative (counted from the end). Shape violations throw ShapeError naming the
// primitive and the offending dimensions.
namespace dfsd::ops {

// Elementwise binary ops broadcast numpy-style: shapes are right-aligned and
// size-1 (or missing leading) dimensions stretch.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double c);
Tensor neg(const Tensor& x);

/// [..., m, k] x [k, n] -> [..., m, n], or batched [b, m, k] x [b, k, n] -> [b, m, n].
Tensor matmul(const Tensor& a, const Tensor& b);
/// Swaps the last two axes.
Tensor transpose(const Tensor& x);

Tensor reshape(const Tensor& x, Shape shape);
Tensor broadcast_to(const Tensor& x, const Shape& shape);
Tensor concat(const std::vector<Tensor>& parts, int axis);
/// Half-open range [begin, end) along `axis`.
Tensor slice(const Tensor& x, int axis, std::size_t begin, std::size_t end);

Tensor tanh(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor exp(const Tensor& x);
/// Throws DomainError for non-positive entries.
Tensor log(const Tensor& x);
/// Throws DomainError for negative entries. The derivative at 0 is taken as 0.
Tensor sqrt(const Tensor& x);
Tensor square(const Tensor& x);

/// softmax(x / temperature) along `axis`, computed with max subtraction.
Tensor softmax(const Tensor& x, int axis, double temperature = 1.0);

Tensor sum(const Tensor& x, int axis, bool keepdim = false);
Tensor mean(const Tensor& x, int axis, bool keepdim = false);
/// Sum of all entries as a shape-[1] tensor.
Tensor sum_all(const Tensor& x);
Tensor mean_all(const Tensor& x);

/// Value-identical copy with no graph node: gradients never flow through it.
Tensor detach(const Tensor& x);

}  // namespace dfsd::ops
