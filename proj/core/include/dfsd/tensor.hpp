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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dfsd {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

class Tensor;

namespace detail {

struct Node;

struct TensorImpl {
  Shape shape;
  std::vector<double> values;
  bool requires_grad = false;
  std::shared_ptr<Node> node;
  std::uint64_t id = 0;
};

// Receives the output tensor (for saved activations), the gradient flowing into
// it and one accumulation buffer per parent. Buffers are null for parents that
// do not require a gradient.
using BackwardFn = std::function<void(const TensorImpl& out, std::span<const double> grad_out,
                                      std::span<std::vector<double>* const> parent_grads)>;

struct Node {
  const char* op = "";
  std::vector<std::shared_ptr<TensorImpl>> parents;
  BackwardFn backward;
};

}  // namespace detail

/// Dense row-major array of doubles, optionally recorded on a computation tape.
///
/// Tensor is a cheap handle: copies share storage and graph position. Leaves
/// created with requires_grad=true are the parameters gradients are reported
/// for; op results that depend on such a leaf carry a graph node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor from_values(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const;
  /// Size of `axis`; negative axes count from the end.
  std::size_t dim(int axis) const;

  std::span<const double> values() const;
  /// Writable storage; only valid on leaves (tensors without a graph node).
  std::span<double> mutable_values();
  double item() const;

  bool requires_grad() const;
  bool has_node() const;
  std::uint64_t id() const;

  /// Value copy with no graph node and requires_grad=false.
  Tensor clone() const;

  const std::shared_ptr<detail::TensorImpl>& impl() const { return impl_; }
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

/// Disables tape recording on the current thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_mode_enabled();

namespace detail {

std::uint64_t next_tensor_id();

// Builds an op result. A node is attached only when grad mode is on and at
// least one operand requires a gradient.
Tensor make_result(Shape shape, std::vector<double> values, const char* op,
                   std::vector<Tensor> operands, BackwardFn backward);

}  // namespace detail

}  // namespace dfsd
