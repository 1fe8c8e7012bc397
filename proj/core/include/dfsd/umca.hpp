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

#include <array>

#include "dfsd/mia.hpp"
#include "dfsd/model.hpp"

namespace dfsd {

struct AttentionOutput {
  Tensor output;   // [..., q, D]
  Tensor weights;  // [..., q, S], rows sum to 1
};

struct Stage1Output {
  ModalityTensors reps;  // [B, 1, D]; text is post-MIA-1 when the gate is on
  Tensor weights;        // [B, 1, 3]
};

struct Stage2Output {
  ModalityTensors seq;  // [B, 7, D]
  Tensor weights;       // [B, 7, 3]
  Tensor final_rep;     // [B, D]
};

/// Every intermediate of one pass through the network.
struct FlowOutputs {
  ModalityTensors projected;  // E_m, [B, S, D]
  Stage1Output stage1;
  Tensor text_stage1_input;  // text rep entering MIA-1 (equals stage1.reps[text] when gated off)
  Tensor multiview;          // [B, 7, D]
  Stage2Output stage2;
  Tensor text_seq_input;  // text seq entering MIA-2
  Tensor prediction;      // [B]
};

/// Maps raw features [..., S, D_raw_m] to the shared width D.
Tensor project_modality(const Tensor& raw, Modality m, const UmcaParams& params);

/// Single-head cross-attention of `query` over the sequence `seq`:
///   V = affine_v(seq), K = tanh(affine_k(V)), out = softmax(Q K^T / tau) V.
/// Shapes: query [q, D] or [B, q, D]; seq [S, D] or [B, S, D]. An unbatched
/// query is shared across a batched sequence.
AttentionOutput cross_attend(const Tensor& query, const Tensor& seq, const AttentionMaps& maps, double tau);

/// Softmax gating over the three modalities from their concatenated reps.
Tensor afg_weights(const Tensor& audio, const Tensor& vision, const Tensor& text, const Mlp& afg);

/// Seven weighted combinations of the stage-1 reps, rows ordered
/// [a, v, t, av, at, vt, avt]. Weights of dropped modalities are zeroed, the
/// rest are kept as-is (no renormalisation).
Tensor multiview_queries(const ModalityTensors& reps, const Tensor& weights);

ModalityTensors stage2_attend(const Tensor& multiview, const ModalityTensors& projected, const UmcaParams& params);

/// Per-row AFG weighting of the stage-2 sequences, then a mean over the 7 rows.
Stage2Output stage2_pool(const ModalityTensors& seq, const Mlp& afg);

Stage2Output stage2_fuse(const Tensor& multiview, const ModalityTensors& projected, const UmcaParams& params);

/// Valence head: [B, D] -> [B] (or [D] -> [1]). No clamping.
Tensor regress(const Tensor& final_rep, const Mlp& head);

/// Full two-stage pass on projected inputs. With the gate on, MIA-1 rewrites
/// the stage-1 text rep and MIA-2 the stage-2 text sequence.
FlowOutputs umca_forward(const ModalityTensors& projected, const UmcaParams& params, const MiaGate& gate);

/// Projects raw [B, S, D_raw_m] features then runs umca_forward.
FlowOutputs run_flow(const ModalityTensors& raw, const Model& model, bool mia_active);

}  // namespace dfsd
