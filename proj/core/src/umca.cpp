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

#include "dfsd/umca.hpp"

#include <cassert>
#include <string>

#include "dfsd/error.hpp"
#include "dfsd/ops.hpp"

namespace dfsd {

namespace {

// w[..., m:m+1] * reps[m], broadcasting the weight over the feature axis.
Tensor weighted(const Tensor& weights, Modality m, const Tensor& rep) {
  return ops::mul(ops::slice(weights, -1, index(m), index(m) + 1), rep);
}

void require_same_shape(const char* op, const ModalityTensors& t) {
  if (t[0].shape() != t[1].shape() || t[0].shape() != t[2].shape()) {
    throw ShapeError(std::string(op) + ": modality shapes differ: " + shape_str(t[0].shape()) + ", " +
                     shape_str(t[1].shape()) + ", " + shape_str(t[2].shape()));
  }
}

}  // namespace

Tensor project_modality(const Tensor& raw, Modality m, const UmcaParams& params) {
  const auto& mlp = params.projection[index(m)];
  if (raw.rank() < 2 || raw.dim(-1) != mlp.layers.front().in_dim()) {
    throw ShapeError("project_modality: " + std::string(modality_name(m)) + " features " + shape_str(raw.shape()) +
                     " do not match raw dim " + std::to_string(mlp.layers.front().in_dim()));
  }
  return mlp_forward(mlp, raw);
}

AttentionOutput cross_attend(const Tensor& query, const Tensor& seq, const AttentionMaps& maps, double tau) {
  if (!(tau > 0.0)) throw DomainError("cross_attend: temperature must be positive");
  if (query.dim(-1) != seq.dim(-1)) {
    throw ShapeError("cross_attend: query " + shape_str(query.shape()) + " and sequence " + shape_str(seq.shape()) +
                     " differ in width");
  }
  Tensor q = query;
  if (query.rank() == 2 && seq.rank() == 3) {
    q = ops::broadcast_to(query, {seq.dim(0), query.dim(0), query.dim(1)});
  } else if (query.rank() != seq.rank() || seq.rank() < 2 || seq.rank() > 3 ||
             (seq.rank() == 3 && query.dim(0) != seq.dim(0))) {
    throw ShapeError("cross_attend: unsupported shapes " + shape_str(query.shape()) + " and " +
                     shape_str(seq.shape()));
  }
  const Tensor values = affine_forward(maps.value, seq);
  const Tensor keys = ops::tanh(affine_forward(maps.key, values));
  const Tensor attn = ops::softmax(ops::matmul(q, ops::transpose(keys)), -1, tau);
  return {ops::matmul(attn, values), attn};
}

Tensor afg_weights(const Tensor& audio, const Tensor& vision, const Tensor& text, const Mlp& afg) {
  require_same_shape("afg_weights", {audio, vision, text});
  return ops::softmax(mlp_forward(afg, ops::concat({audio, vision, text}, -1)), -1);
}

Tensor multiview_queries(const ModalityTensors& reps, const Tensor& weights) {
  require_same_shape("multiview_queries", reps);
  if (weights.dim(-1) != kNumModalities || weights.rank() != reps[0].rank()) {
    throw ShapeError("multiview_queries: weights " + shape_str(weights.shape()) + " do not fit reps " +
                     shape_str(reps[0].shape()));
  }
  const Tensor a = weighted(weights, Modality::audio, reps[0]);
  const Tensor v = weighted(weights, Modality::vision, reps[1]);
  const Tensor t = weighted(weights, Modality::text, reps[2]);
  return ops::concat({a, v, t, ops::add(a, v), ops::add(a, t), ops::add(v, t), ops::add(ops::add(a, v), t)}, -2);
}

ModalityTensors stage2_attend(const Tensor& multiview, const ModalityTensors& projected, const UmcaParams& params) {
  if (multiview.dim(-2) != kNumViews) {
    throw ShapeError("stage2: multi-view query must have 7 rows, got " + shape_str(multiview.shape()));
  }
  ModalityTensors seq;
  for (Modality m : kModalities) {
    seq[index(m)] = cross_attend(multiview, projected[index(m)], params.stage2[index(m)], params.tau_attn).output;
  }
  return seq;
}

Stage2Output stage2_pool(const ModalityTensors& seq, const Mlp& afg) {
  const Tensor w = afg_weights(seq[0], seq[1], seq[2], afg);
  Tensor fused = weighted(w, Modality::audio, seq[0]);
  fused = ops::add(fused, weighted(w, Modality::vision, seq[1]));
  fused = ops::add(fused, weighted(w, Modality::text, seq[2]));
  return {seq, w, ops::mean(fused, -2)};
}

Stage2Output stage2_fuse(const Tensor& multiview, const ModalityTensors& projected, const UmcaParams& params) {
  return stage2_pool(stage2_attend(multiview, projected, params), params.afg2);
}

Tensor regress(const Tensor& final_rep, const Mlp& head) {
  if (final_rep.rank() == 1) {
    return ops::reshape(mlp_forward(head, ops::reshape(final_rep, {1, final_rep.dim(0)})), {1});
  }
  const Tensor out = mlp_forward(head, final_rep);
  return ops::reshape(out, {out.numel()});
}

FlowOutputs umca_forward(const ModalityTensors& projected, const UmcaParams& params, const MiaGate& gate) {
  assert(!gate.active() || gate.stage2 != nullptr);
  require_same_shape("umca_forward", projected);
  FlowOutputs out;
  out.projected = projected;

  auto& s1 = out.stage1.reps;
  for (Modality m : kModalities) {
    s1[index(m)] =
        cross_attend(params.query[index(m)], projected[index(m)], params.stage1[index(m)], params.tau_attn).output;
  }
  out.text_stage1_input = s1[index(Modality::text)];
  if (gate.active()) {
    s1[index(Modality::text)] = mia_forward(s1[index(Modality::vision)], s1[index(Modality::audio)],
                                            s1[index(Modality::text)], *gate.stage1);
  }
  out.stage1.weights = afg_weights(s1[0], s1[1], s1[2], params.afg1);
  out.multiview = multiview_queries(s1, out.stage1.weights);

  ModalityTensors seq = stage2_attend(out.multiview, projected, params);
  out.text_seq_input = seq[index(Modality::text)];
  if (gate.active()) {
    seq[index(Modality::text)] = mia_forward(seq[index(Modality::vision)], seq[index(Modality::audio)],
                                             seq[index(Modality::text)], *gate.stage2);
  }
  out.stage2 = stage2_pool(seq, params.afg2);
  out.prediction = regress(out.stage2.final_rep, params.head);
  return out;
}

FlowOutputs run_flow(const ModalityTensors& raw, const Model& model, bool mia_active) {
  ModalityTensors projected;
  for (Modality m : kModalities) projected[index(m)] = project_modality(raw[index(m)], m, model.umca());
  return umca_forward(projected, model.umca(), mia_active ? MiaGate::on(model) : MiaGate::off());
}

}  // namespace dfsd
