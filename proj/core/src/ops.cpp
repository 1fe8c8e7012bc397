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

#include "dfsd/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dfsd/error.hpp"

namespace dfsd::ops {

namespace {

using detail::TensorImpl;
using GradSpan = std::span<std::vector<double>* const>;

std::size_t norm_axis(const char* op, int axis, std::size_t rank) {
  const auto r = static_cast<int>(rank);
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) {
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " out of range for rank " +
                     std::to_string(rank));
  }
  return static_cast<std::size_t>(a);
}

const std::vector<double>& parent_values(const TensorImpl& out, std::size_t i) {
  return out.node->parents[i]->values;
}

std::vector<std::size_t> contiguous_strides(const Shape& shape) {
  std::vector<std::size_t> s(shape.size(), 1);
  for (std::size_t i = shape.size(); i-- > 1;) s[i - 1] = s[i] * shape[i];
  return s;
}

// Strides of `in` viewed in the index space of `out` (right-aligned, 0 where broadcast).
std::vector<std::size_t> broadcast_strides(const Shape& in, const Shape& out) {
  const auto cs = contiguous_strides(in);
  std::vector<std::size_t> s(out.size(), 0);
  const std::size_t off = out.size() - in.size();
  for (std::size_t i = 0; i < in.size(); ++i) s[off + i] = in[i] == 1 ? 0 : cs[i];
  return s;
}

Shape broadcast_shape(const char* op, const Shape& a, const Shape& b) {
  const std::size_t r = std::max(a.size(), b.size());
  Shape out(r, 1);
  for (std::size_t i = 0; i < r; ++i) {
    const std::size_t da = i < r - a.size() ? 1 : a[i - (r - a.size())];
    const std::size_t db = i < r - b.size() ? 1 : b[i - (r - b.size())];
    if (da != db && da != 1 && db != 1) {
      throw ShapeError(std::string(op) + ": cannot broadcast " + shape_str(a) + " with " +
                       shape_str(b));
    }
    out[i] = std::max(da, db);
  }
  return out;
}

// Calls f(out_index, a_index, b_index) over the broadcast index space.
template <class F>
void for_each_broadcast(const Shape& out, const std::vector<std::size_t>& sa,
                        const std::vector<std::size_t>& sb, F&& f) {
  const std::size_t r = out.size();
  const std::size_t n = shape_numel(out);
  const std::size_t inner = out[r - 1];
  const std::size_t sa_in = sa[r - 1];
  const std::size_t sb_in = sb[r - 1];
  std::vector<std::size_t> idx(r, 0);
  std::size_t ia = 0;
  std::size_t ib = 0;
  for (std::size_t o = 0; o < n; o += inner) {
    std::size_t a = ia;
    std::size_t b = ib;
    for (std::size_t j = 0; j < inner; ++j, a += sa_in, b += sb_in) f(o + j, a, b);
    for (std::size_t d = r - 1; d-- > 0;) {
      ++idx[d];
      ia += sa[d];
      ib += sb[d];
      if (idx[d] < out[d]) break;
      ia -= sa[d] * out[d];
      ib -= sb[d] * out[d];
      idx[d] = 0;
    }
  }
}

enum class BinaryKind { add, sub, mul };

Tensor binary(const char* op, BinaryKind kind, const Tensor& a, const Tensor& b) {
  const auto& as = a.shape();
  const auto& bs = b.shape();
  const auto& av = a.values();
  const auto& bv = b.values();
  if (as == bs) {
    std::vector<double> out(av.size());
    switch (kind) {
      case BinaryKind::add:
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
        break;
      case BinaryKind::sub:
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
        break;
      case BinaryKind::mul:
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
        break;
    }
    return detail::make_result(as, std::move(out), op, {a, b},
                               [kind](const TensorImpl& self, std::span<const double> g, GradSpan pg) {
                                 const auto& x = parent_values(self, 0);
                                 const auto& y = parent_values(self, 1);
                                 if (auto* ga = pg[0]) {
                                   if (kind == BinaryKind::mul) {
                                     for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i] * y[i];
                                   } else {
                                     for (std::size_t i = 0; i < g.size(); ++i) (*ga)[i] += g[i];
                                   }
                                 }
                                 if (auto* gb = pg[1]) {
                                   switch (kind) {
                                     case BinaryKind::add:
                                       for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i];
                                       break;
                                     case BinaryKind::sub:
                                       for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] -= g[i];
                                       break;
                                     case BinaryKind::mul:
                                       for (std::size_t i = 0; i < g.size(); ++i) (*gb)[i] += g[i] * x[i];
                                       break;
                                   }
                                 }
                               });
  }

  Shape out_shape = broadcast_shape(op, as, bs);
  auto sa = broadcast_strides(as, out_shape);
  auto sb = broadcast_strides(bs, out_shape);
  std::vector<double> out(shape_numel(out_shape));
  switch (kind) {
    case BinaryKind::add:
      for_each_broadcast(out_shape, sa, sb,
                         [&](std::size_t o, std::size_t i, std::size_t j) { out[o] = av[i] + bv[j]; });
      break;
    case BinaryKind::sub:
      for_each_broadcast(out_shape, sa, sb,
                         [&](std::size_t o, std::size_t i, std::size_t j) { out[o] = av[i] - bv[j]; });
      break;
    case BinaryKind::mul:
      for_each_broadcast(out_shape, sa, sb,
                         [&](std::size_t o, std::size_t i, std::size_t j) { out[o] = av[i] * bv[j]; });
      break;
  }
  return detail::make_result(
      out_shape, std::move(out), op, {a, b},
      [kind, sa = std::move(sa), sb = std::move(sb)](const TensorImpl& self, std::span<const double> g,
                                                      GradSpan pg) {
        const auto& x = parent_values(self, 0);
        const auto& y = parent_values(self, 1);
        auto* ga = pg[0];
        auto* gb = pg[1];
        for_each_broadcast(self.shape, sa, sb, [&](std::size_t o, std::size_t i, std::size_t j) {
          switch (kind) {
            case BinaryKind::add:
              if (ga) (*ga)[i] += g[o];
              if (gb) (*gb)[j] += g[o];
              break;
            case BinaryKind::sub:
              if (ga) (*ga)[i] += g[o];
              if (gb) (*gb)[j] -= g[o];
              break;
            case BinaryKind::mul:
              if (ga) (*ga)[i] += g[o] * y[j];
              if (gb) (*gb)[j] += g[o] * x[i];
              break;
          }
        });
      });
}

// Elementwise unary op; `deriv(x, y)` is dy/dx given input and output.
template <class Fwd, class Deriv>
Tensor unary(const char* op, const Tensor& x, Fwd fwd, Deriv deriv) {
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(xv[i]);
  return detail::make_result(x.shape(), std::move(out), op, {x},
                             [deriv](const TensorImpl& self, std::span<const double> g, GradSpan pg) {
                               auto* gx = pg[0];
                               if (!gx) return;
                               const auto& in = parent_values(self, 0);
                               for (std::size_t i = 0; i < g.size(); ++i) {
                                 (*gx)[i] += g[i] * deriv(in[i], self.values[i]);
                               }
                             });
}

// C[m x n] += A[m x k] * B[k x n]
void acc_ab(const double* A, const double* B, double* C, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* c = C + i * n;
    const double* a = A + i * k;
    for (std::size_t p = 0; p < k; ++p) {
      const double ap = a[p];
      const double* b = B + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += ap * b[j];
    }
  }
}

// C[m x n] += A[m x k] * B[n x k]^T
void acc_abt(const double* A, const double* B, double* C, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* a = A + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* b = B + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[p] * b[p];
      C[i * n + j] += s;
    }
  }
}

// C[m x n] += A[k x m]^T * B[k x n]
void acc_atb(const double* A, const double* B, double* C, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* a = A + p * m;
    const double* b = B + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double ai = a[i];
      double* c = C + i * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += ai * b[j];
    }
  }
}

struct AxisSplit {
  std::size_t outer = 1;
  std::size_t len = 1;
  std::size_t inner = 1;
};

AxisSplit split_axis(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.len = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary("add", BinaryKind::add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary("sub", BinaryKind::sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary("mul", BinaryKind::mul, a, b); }

Tensor scale(const Tensor& x, double factor) {
  return unary(
      "scale", x, [factor](double v) { return v * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double c) {
  return unary(
      "add_scalar", x, [c](double v) { return v + c; }, [](double, double) { return 1.0; });
}

Tensor neg(const Tensor& x) {
  return unary(
      "neg", x, [](double v) { return -v; }, [](double, double) { return -1.0; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  const auto& as = a.shape();
  const auto& bs = b.shape();
  if (as.size() < 2 || bs.size() < 2) {
    throw ShapeError("matmul: operands need rank >= 2, got " + shape_str(as) + " and " + shape_str(bs));
  }
  if (bs.size() == 2) {
    const std::size_t k = as.back();
    if (bs[0] != k) {
      throw ShapeError("matmul: inner dims differ, " + shape_str(as) + " x " + shape_str(bs));
    }
    const std::size_t n = bs[1];
    const std::size_t rows = a.numel() / k;
    Shape out_shape = as;
    out_shape.back() = n;
    std::vector<double> out(rows * n, 0.0);
    acc_ab(a.values().data(), b.values().data(), out.data(), rows, k, n);
    return detail::make_result(std::move(out_shape), std::move(out), "matmul", {a, b},
                               [rows, k, n](const TensorImpl& self, std::span<const double> g, GradSpan pg) {
                                 const auto& A = parent_values(self, 0);
                                 const auto& B = parent_values(self, 1);
                                 if (auto* ga = pg[0]) acc_abt(g.data(), B.data(), ga->data(), rows, n, k);
                                 if (auto* gb = pg[1]) acc_atb(A.data(), g.data(), gb->data(), k, rows, n);
                               });
  }
  if (as.size() == 3 && bs.size() == 3) {
    const std::size_t batch = as[0];
    const std::size_t m = as[1];
    const std::size_t k = as[2];
    const std::size_t n = bs[2];
    if (bs[0] != batch || bs[1] != k) {
      throw ShapeError("matmul: batched operands mismatch, " + shape_str(as) + " x " + shape_str(bs));
    }
    std::vector<double> out(batch * m * n, 0.0);
    for (std::size_t t = 0; t < batch; ++t) {
      acc_ab(a.values().data() + t * m * k, b.values().data() + t * k * n, out.data() + t * m * n, m, k, n);
    }
    return detail::make_result(
        {batch, m, n}, std::move(out), "matmul", {a, b},
        [batch, m, k, n](const TensorImpl& self, std::span<const double> g, GradSpan pg) {
          const auto& A = parent_values(self, 0);
          const auto& B = parent_values(self, 1);
          for (std::size_t t = 0; t < batch; ++t) {
            const double* gt = g.data() + t * m * n;
            if (auto* ga = pg[0]) acc_abt(gt, B.data() + t * k * n, ga->data() + t * m * k, m, n, k);
            if (auto* gb = pg[1]) acc_atb(A.data() + t * m * k, gt, gb->data() + t * k * n, k, m, n);
          }
        });
  }
  throw ShapeError("matmul: unsupported operand ranks " + shape_str(as) + " x " + shape_str(bs));
}

Tensor transpose(const Tensor& x) {
  const auto& s = x.shape();
  if (s.size() < 2) throw ShapeError("transpose: need rank >= 2, got " + shape_str(s));
  const std::size_t m = s[s.size() - 2];
  const std::size_t n = s.back();
  const std::size_t batch = x.numel() / (m * n);
  Shape out_shape = s;
  std::swap(out_shape[s.size() - 2], out_shape.back());
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  for (std::size_t t = 0; t < batch; ++t) {
    const double* src = xv.data() + t * m * n;
    double* dst = out.data() + t * m * n;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) dst[j * m + i] = src[i * n + j];
  }
  return detail::make_result(std::move(out_shape), std::move(out), "transpose", {x},
                             [batch, m, n](const TensorImpl&, std::span<const double> g, GradSpan pg) {
                               auto* gx = pg[0];
                               if (!gx) return;
                               for (std::size_t t = 0; t < batch; ++t) {
                                 const double* src = g.data() + t * m * n;
                                 double* dst = gx->data() + t * m * n;
                                 for (std::size_t i = 0; i < m; ++i)
                                   for (std::size_t j = 0; j < n; ++j) dst[i * n + j] += src[j * m + i];
                               }
                             });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel() || shape.empty()) {
    throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  return detail::make_result(std::move(shape), std::move(out), "reshape", {x},
                             [](const TensorImpl&, std::span<const double> g, GradSpan pg) {
                               if (auto* gx = pg[0])
                                 for (std::size_t i = 0; i < g.size(); ++i) (*gx)[i] += g[i];
                             });
}

Tensor broadcast_to(const Tensor& x, const Shape& shape) {
  const auto& s = x.shape();
  if (shape.size() < s.size() || broadcast_shape("broadcast_to", s, shape) != shape) {
    throw ShapeError("broadcast_to: cannot broadcast " + shape_str(s) + " to " + shape_str(shape));
  }
  auto sx = broadcast_strides(s, shape);
  std::vector<std::size_t> zero(shape.size(), 0);
  const auto xv = x.values();
  std::vector<double> out(shape_numel(shape));
  for_each_broadcast(shape, sx, zero, [&](std::size_t o, std::size_t i, std::size_t) { out[o] = xv[i]; });
  return detail::make_result(shape, std::move(out), "broadcast_to", {x},
                             [sx = std::move(sx), zero = std::move(zero)](
                                 const TensorImpl& self, std::span<const double> g, GradSpan pg) {
                               auto* gx = pg[0];
                               if (!gx) return;
                               for_each_broadcast(self.shape, sx, zero, [&](std::size_t o, std::size_t i, std::size_t) {
                                 (*gx)[i] += g[o];
                               });
                             });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no operands");
  const auto& s0 = parts[0].shape();
  const std::size_t ax = norm_axis("concat", axis, s0.size());
  std::size_t total = 0;
  std::vector<std::size_t> lens;
  lens.reserve(parts.size());
  for (const auto& p : parts) {
    const auto& s = p.shape();
    bool ok = s.size() == s0.size();
    for (std::size_t i = 0; ok && i < s.size(); ++i) ok = i == ax || s[i] == s0[i];
    if (!ok) {
      throw ShapeError("concat: " + shape_str(s) + " does not match " + shape_str(s0) + " off axis " +
                       std::to_string(ax));
    }
    lens.push_back(s[ax]);
    total += s[ax];
  }
  Shape out_shape = s0;
  out_shape[ax] = total;
  const auto split = split_axis(out_shape, ax);
  std::vector<double> out(shape_numel(out_shape));
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const std::size_t chunk = lens[p] * split.inner;
    const auto pv = parts[p].values();
    for (std::size_t o = 0; o < split.outer; ++o) {
      std::copy_n(pv.data() + o * chunk, chunk, out.data() + o * total * split.inner + offset);
    }
    offset += chunk;
  }
  return detail::make_result(
      std::move(out_shape), std::move(out), "concat", parts,
      [lens = std::move(lens), split, total](const TensorImpl&, std::span<const double> g, GradSpan pg) {
        std::size_t offset = 0;
        for (std::size_t p = 0; p < lens.size(); ++p) {
          const std::size_t chunk = lens[p] * split.inner;
          if (auto* gp = pg[p]) {
            for (std::size_t o = 0; o < split.outer; ++o) {
              const double* src = g.data() + o * total * split.inner + offset;
              double* dst = gp->data() + o * chunk;
              for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
            }
          }
          offset += chunk;
        }
      });
}

Tensor slice(const Tensor& x, int axis, std::size_t begin, std::size_t end) {
  const auto& s = x.shape();
  const std::size_t ax = norm_axis("slice", axis, s.size());
  if (begin >= end || end > s[ax]) {
    throw ShapeError("slice: range [" + std::to_string(begin) + ", " + std::to_string(end) +
                     ") invalid for axis " + std::to_string(ax) + " of " + shape_str(s));
  }
  const auto split = split_axis(s, ax);
  const std::size_t len = end - begin;
  Shape out_shape = s;
  out_shape[ax] = len;
  const auto xv = x.values();
  std::vector<double> out(split.outer * len * split.inner);
  for (std::size_t o = 0; o < split.outer; ++o) {
    std::copy_n(xv.data() + (o * split.len + begin) * split.inner, len * split.inner,
                out.data() + o * len * split.inner);
  }
  return detail::make_result(std::move(out_shape), std::move(out), "slice", {x},
                             [split, begin, len](const TensorImpl&, std::span<const double> g, GradSpan pg) {
                               auto* gx = pg[0];
                               if (!gx) return;
                               const std::size_t chunk = len * split.inner;
                               for (std::size_t o = 0; o < split.outer; ++o) {
                                 const double* src = g.data() + o * chunk;
                                 double* dst = gx->data() + (o * split.len + begin) * split.inner;
                                 for (std::size_t i = 0; i < chunk; ++i) dst[i] += src[i];
                               }
                             });
}

Tensor tanh(const Tensor& x) {
  return unary(
      "tanh", x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& x) {
  return unary(
      "relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor exp(const Tensor& x) {
  return unary(
      "exp", x, [](double v) { return std::exp(v); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& x) {
  for (double v : x.values()) {
    if (!(v > 0.0)) throw DomainError("log: non-positive operand " + std::to_string(v));
  }
  return unary(
      "log", x, [](double v) { return std::log(v); }, [](double v, double) { return 1.0 / v; });
}

Tensor sqrt(const Tensor& x) {
  for (double v : x.values()) {
    if (!(v >= 0.0)) throw DomainError("sqrt: negative operand " + std::to_string(v));
  }
  return unary(
      "sqrt", x, [](double v) { return std::sqrt(v); },
      [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
}

Tensor square(const Tensor& x) {
  return unary(
      "square", x, [](double v) { return v * v; }, [](double v, double) { return 2.0 * v; });
}

Tensor softmax(const Tensor& x, int axis, double temperature) {
  if (!(temperature > 0.0)) {
    throw DomainError("softmax: temperature must be positive, got " + std::to_string(temperature));
  }
  const std::size_t ax = norm_axis("softmax", axis, x.rank());
  const auto sp = split_axis(x.shape(), ax);
  const auto xv = x.values();
  std::vector<double> out(xv.size());
  const double inv_t = 1.0 / temperature;
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t in = 0; in < sp.inner; ++in) {
      const std::size_t base = o * sp.len * sp.inner + in;
      double mx = xv[base] * inv_t;
      for (std::size_t i = 1; i < sp.len; ++i) mx = std::max(mx, xv[base + i * sp.inner] * inv_t);
      double z = 0.0;
      for (std::size_t i = 0; i < sp.len; ++i) {
        const double e = std::exp(xv[base + i * sp.inner] * inv_t - mx);
        out[base + i * sp.inner] = e;
        z += e;
      }
      for (std::size_t i = 0; i < sp.len; ++i) out[base + i * sp.inner] /= z;
    }
  }
  return detail::make_result(x.shape(), std::move(out), "softmax", {x},
                             [sp, inv_t](const TensorImpl& self, std::span<const double> g, GradSpan pg) {
                               auto* gx = pg[0];
                               if (!gx) return;
                               const auto& y = self.values;
                               for (std::size_t o = 0; o < sp.outer; ++o) {
                                 for (std::size_t in = 0; in < sp.inner; ++in) {
                                   const std::size_t base = o * sp.len * sp.inner + in;
                                   double dot = 0.0;
                                   for (std::size_t i = 0; i < sp.len; ++i) {
                                     const std::size_t k = base + i * sp.inner;
                                     dot += g[k] * y[k];
                                   }
                                   for (std::size_t i = 0; i < sp.len; ++i) {
                                     const std::size_t k = base + i * sp.inner;
                                     (*gx)[k] += inv_t * y[k] * (g[k] - dot);
                                   }
                                 }
                               }
                             });
}

Tensor sum(const Tensor& x, int axis, bool keepdim) {
  const std::size_t ax = norm_axis("sum", axis, x.rank());
  const auto sp = split_axis(x.shape(), ax);
  Shape out_shape = x.shape();
  if (keepdim) {
    out_shape[ax] = 1;
  } else {
    out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(ax));
    if (out_shape.empty()) out_shape = {1};
  }
  const auto xv = x.values();
  std::vector<double> out(sp.outer * sp.inner, 0.0);
  for (std::size_t o = 0; o < sp.outer; ++o)
    for (std::size_t i = 0; i < sp.len; ++i)
      for (std::size_t in = 0; in < sp.inner; ++in)
        out[o * sp.inner + in] += xv[(o * sp.len + i) * sp.inner + in];
  return detail::make_result(std::move(out_shape), std::move(out), "sum", {x},
                             [sp](const TensorImpl&, std::span<const double> g, GradSpan pg) {
                               auto* gx = pg[0];
                               if (!gx) return;
                               for (std::size_t o = 0; o < sp.outer; ++o)
                                 for (std::size_t i = 0; i < sp.len; ++i)
                                   for (std::size_t in = 0; in < sp.inner; ++in)
                                     (*gx)[(o * sp.len + i) * sp.inner + in] += g[o * sp.inner + in];
                             });
}

Tensor mean(const Tensor& x, int axis, bool keepdim) {
  const double len = static_cast<double>(x.dim(axis));
  return scale(sum(x, axis, keepdim), 1.0 / len);
}

Tensor sum_all(const Tensor& x) {
  double s = 0.0;
  for (double v : x.values()) s += v;
  return detail::make_result({1}, {s}, "sum_all", {x},
                             [](const TensorImpl&, std::span<const double> g, GradSpan pg) {
                               auto* gx = pg[0];
                               if (!gx) return;
                               for (auto& v : *gx) v += g[0];
                             });
}

Tensor mean_all(const Tensor& x) { return scale(sum_all(x), 1.0 / static_cast<double>(x.numel())); }

Tensor detach(const Tensor& x) {
  return Tensor::from_values(x.shape(), std::vector<double>(x.values().begin(), x.values().end()), false);
}

}  // namespace dfsd::ops
