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

#include <cstdint>
#include <unordered_map>

#include "dfsd/tensor.hpp"

namespace dfsd {

/// Gradients of a scalar loss keyed by leaf identity.
class GradMap {
 public:
  /// Gradient for `leaf`; a zero tensor of the leaf's shape when the leaf was unreachable.
  Tensor grad(const Tensor& leaf) const;
  /// Stored gradient or nullptr when the leaf was not reached.
  const Tensor* find(const Tensor& leaf) const;
  bool contains(const Tensor& leaf) const { return find(leaf) != nullptr; }
  std::size_t size() const { return grads_.size(); }

  void insert(std::uint64_t leaf_id, Tensor grad) { grads_.insert_or_assign(leaf_id, std::move(grad)); }

 private:
  std::unordered_map<std::uint64_t, Tensor> grads_;
};

/// Reverse-mode sweep from a scalar loss. Throws ShapeError for a non-scalar
/// loss and std::invalid_argument for a loss that is not attached to a graph.
GradMap backward(const Tensor& loss);

}  // namespace dfsd
