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

#include "dfsd/autograd.hpp"

#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "dfsd/error.hpp"

namespace dfsd {

using detail::TensorImpl;

Tensor GradMap::grad(const Tensor& leaf) const {
  if (const auto* g = find(leaf)) return *g;
  return Tensor::zeros(leaf.shape());
}

const Tensor* GradMap::find(const Tensor& leaf) const {
  auto it = grads_.find(leaf.id());
  return it == grads_.end() ? nullptr : &it->second;
}

namespace {

// Post-order DFS over requires_grad impls; parents precede children.
std::vector<TensorImpl*> topo_order(TensorImpl* root) {
  std::vector<TensorImpl*> order;
  std::unordered_set<TensorImpl*> seen;
  std::vector<std::pair<TensorImpl*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [impl, next] = stack.back();
    if (impl->node && next < impl->node->parents.size()) {
      TensorImpl* parent = impl->node->parents[next++].get();
      if (parent->requires_grad && seen.insert(parent).second) stack.emplace_back(parent, 0);
      continue;
    }
    order.push_back(impl);
    stack.pop_back();
  }
  return order;
}

}  // namespace

GradMap backward(const Tensor& loss) {
  if (!loss.defined() || loss.numel() != 1) {
    throw ShapeError("backward: loss must be scalar, got " +
                     (loss.defined() ? shape_str(loss.shape()) : std::string("undefined")));
  }
  if (!loss.has_node()) throw std::invalid_argument("backward: loss is not attached to a graph");

  auto order = topo_order(loss.impl().get());
  std::unordered_map<const TensorImpl*, std::vector<double>> grads;
  grads.reserve(order.size());
  grads[loss.impl().get()] = {1.0};

  GradMap out;
  std::vector<std::vector<double>*> buffers;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorImpl* impl = *it;
    auto gi = grads.find(impl);
    if (gi == grads.end()) continue;
    if (!impl->node) {
      out.insert(impl->id, Tensor::from_values(impl->shape, std::move(gi->second)));
      grads.erase(gi);
      continue;
    }
    const auto& parents = impl->node->parents;
    buffers.assign(parents.size(), nullptr);
    for (std::size_t p = 0; p < parents.size(); ++p) {
      TensorImpl* parent = parents[p].get();
      if (!parent->requires_grad) continue;
      auto [slot, fresh] = grads.try_emplace(parent);
      if (fresh) slot->second.assign(parent->values.size(), 0.0);
      buffers[p] = &slot->second;
    }
    // Re-find: try_emplace above may have rehashed.
    gi = grads.find(impl);
    std::vector<double> g = std::move(gi->second);
    grads.erase(gi);
    impl->node->backward(*impl, g, buffers);
  }
  return out;
}

}  // namespace dfsd
