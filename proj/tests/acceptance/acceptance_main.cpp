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

// Acceptance checks, one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dfsd/ablation.hpp"
#include "dfsd/log.hpp"
#include "dfsd/metrics.hpp"
#include "dfsd/ops.hpp"
#include "dfsd/train.hpp"
#include "dfsd/umca.hpp"
#include "fixtures.hpp"
#include "grad_cases.hpp"
#include "rnc_oracle.hpp"

namespace dfsd {
namespace {

namespace fs = std::filesystem;
using testing::Rng;
using testing::bit_equal;
using testing::random_tensor;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Verdict& v) {
  std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str());
  std::fflush(stdout);
  failures += !v.pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// 1. Autodiff vs central differences, 20 instances per function.
Verdict gradient_correctness() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_name;
  std::size_t n_cases = 0;
  for (const auto* cases :
       {&testing::primitive_grad_cases(), &testing::component_grad_cases(), &testing::loss_grad_cases()}) {
    for (const auto& c : *cases) {
      ++n_cases;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const double err = c.run(1000 + seed);
        if (!(err <= worst)) {
          worst = err;
          worst_name = c.name;
        }
      }
    }
  }
  const double t = seconds_since(start);
  return {worst < 1e-5 && t < 60.0,
          fmt("%zu functions x 20 instances, max rel err %.2e (%s), %.1f s", n_cases, worst, worst_name.c_str(), t)};
}

// 2. rnc_loss vs the brute-force oracle.
Verdict rnc_equivalence() {
  const auto start = Clock::now();
  Rng rng(2024);
  std::uniform_int_distribution<std::size_t> dims(1, 8);
  std::uniform_int_distribution<int> tied(-3, 3);
  std::normal_distribution<double> cont(0.0, 1.5);
  std::uniform_real_distribution<double> taus(0.1, 5.0);
  double worst = 0.0;
  bool n1_zero = true;
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int k = 0; k < 100; ++k) {
      const std::size_t m = 2 * n;
      const std::size_t d = dims(rng);
      const Tensor reps = random_tensor({m, d}, rng, 1.0 + k % 3);
      // Duplicated labels as in training; every other instance uses coarse labels for extra ties.
      std::vector<double> y(n);
      for (auto& v : y) v = k % 2 ? 0.5 * tied(rng) : cont(rng);
      y.insert(y.end(), y.begin(), y.end());
      const double tau = taus(rng);
      const double got = rnc_loss(reps, y, tau).item();
      const double want = testing::rnc_oracle(reps.values(), d, y, tau);
      worst = std::max(worst, std::abs(got - want));
      if (n == 1 && (got != 0.0 || want != 0.0)) n1_zero = false;
    }
  }
  const double t = seconds_since(start);
  return {worst <= 1e-10 && n1_zero && t < 30.0,
          fmt("800 instances, max |loss - oracle| %.2e, N=1 exactly 0: %s, %.2f s", worst, n1_zero ? "yes" : "no", t)};
}

// 3. MKD backprop reaches flow B only.
Verdict detach_contract() {
  const ModelConfig cfg = testing::tiny_model_config(4);
  const Model model = testing::generic_model(cfg, 31);
  Rng rng(31);
  const std::size_t b = 3, s = 3;
  const Tensor audio = random_tensor({b, s, 3}, rng);
  const Tensor vision = random_tensor({b, s, 4}, rng);
  // Real text feeds flow A only; make it a leaf so its gradient is observable.
  const Tensor real_text = random_tensor({b, s, 5}, rng, 1.0, true);
  const Tensor sim_text = random_tensor({b, s, 5}, rng);

  const FlowOutputs a = run_flow({audio, vision, real_text}, model, false);
  const FlowOutputs bflow = run_flow({audio, vision, sim_text}, model, true);
  auto mkd_total = [&](const Tensor& t1, const Tensor& t2) {
    return ops::add(mkd_loss(t1, bflow.stage1.reps[2]), mkd_loss(t2, bflow.stage2.seq[2]));
  };
  const GradMap g = backward(mkd_total(a.stage1.reps[2], a.stage2.seq[2]));

  // Same loss with the teachers replaced by constants: every parameter
  // gradient must match bit for bit.
  const GradMap g_const = backward(mkd_total(a.stage1.reps[2].clone(), a.stage2.seq[2].clone()));

  bool text_zero = !g.contains(real_text);
  const Tensor gt = g.grad(real_text);
  for (double v : gt.values()) text_zero = text_zero && v == 0.0;

  bool params_match = true;
  for (const auto& [name, leaf] : model.params()) {
    params_match = params_match && bit_equal(g.grad(leaf), g_const.grad(leaf));
  }
  bool mia_nonzero = true;
  for (const MiaParams* p : {&model.mia1(), &model.mia2()}) {
    for (const Tensor* t : {&p->encoder.weight, &p->encoder.bias, &p->decoder.weight, &p->decoder.bias}) {
      double mag = 0.0;
      const Tensor gm = g.grad(*t);
      for (double v : gm.values()) mag += std::abs(v);
      mia_nonzero = mia_nonzero && mag > 0.0;
    }
  }
  return {text_zero && params_match && mia_nonzero,
          fmt("flow-A text grad exactly 0: %s; param grads equal constant-teacher grads: %s; all MIA grads nonzero: %s",
              text_zero ? "yes" : "no", params_match ? "yes" : "no", mia_nonzero ? "yes" : "no")};
}

// 4. Bypass, seven-combination, row-stochasticity and gate-off identities.
Verdict structural_identities() {
  Rng rng(44);
  bool bypass = true, combos = true, gate_off = true;
  double worst_row = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ModelConfig cfg = testing::tiny_model_config(4 + trial % 3);
    const std::size_t d = cfg.d_model;
    const Model model = testing::generic_model(cfg, 100 + trial);
    const UmcaParams& p = model.umca();
    const ModalityTensors e = {random_tensor({2, 3, d}, rng), random_tensor({2, 3, d}, rng),
                               random_tensor({2, 3, d}, rng)};

    // MIA with a zero decoder returns its text input unchanged.
    const std::size_t h = cfg.mia_hidden();
    const MiaParams zero{model.mia1().encoder, testing::zero_affine(h, d)};
    const Tensor t = random_tensor({2, 7, d}, rng);
    bypass = bypass && bit_equal(mia_forward(random_tensor({2, 7, d}, rng), random_tensor({2, 7, d}, rng), t, zero), t);

    const FlowOutputs off = umca_forward(e, p, MiaGate::off());

    // Multi-view rows against explicit sums, same association order.
    const Tensor& w = off.stage1.weights;
    const int subsets[7][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}, {1, 1, 1}};
    for (std::size_t bi = 0; bi < 2; ++bi) {
      for (std::size_t row = 0; row < 7; ++row) {
        for (std::size_t k = 0; k < d; ++k) {
          double sum = 0.0;
          bool first = true;
          for (std::size_t m = 0; m < 3; ++m) {
            if (!subsets[row][m]) continue;
            const double term = w.values()[bi * 3 + m] * off.stage1.reps[m].values()[bi * d + k];
            sum = first ? term : sum + term;
            first = false;
          }
          combos = combos && off.multiview.values()[(bi * 7 + row) * d + k] == sum;
        }
      }
    }

    // Attention rows, both stages.
    for (std::size_t m = 0; m < 3; ++m) {
      for (const auto& att : {cross_attend(p.query[m], e[m], p.stage1[m], p.tau_attn),
                              cross_attend(off.multiview, e[m], p.stage2[m], p.tau_attn)}) {
        const std::size_t cols = att.weights.dim(-1);
        for (std::size_t r = 0; r < att.weights.numel() / cols; ++r) {
          double sum = 0.0;
          for (std::size_t c = 0; c < cols; ++c) sum += att.weights.values()[r * cols + c];
          worst_row = std::max(worst_row, std::abs(sum - 1.0));
        }
      }
    }

    // Gate off against a pipeline assembled without any MIA call.
    ModalityTensors s1;
    for (std::size_t m = 0; m < 3; ++m) s1[m] = cross_attend(p.query[m], e[m], p.stage1[m], p.tau_attn).output;
    const Tensor mv = multiview_queries(s1, afg_weights(s1[0], s1[1], s1[2], p.afg1));
    const Stage2Output s2 = stage2_fuse(mv, e, p);
    gate_off = gate_off && bit_equal(off.prediction, regress(s2.final_rep, p.head)) &&
               bit_equal(off.stage2.final_rep, s2.final_rep);
  }
  return {bypass && combos && gate_off && worst_row <= 1e-12,
          fmt("zero-residual bypass bit-exact: %s; 7-row sums exact: %s; max |row sum - 1| %.1e; gate-off == "
              "MIA-free: %s (20 instances)",
              bypass ? "yes" : "no", combos ? "yes" : "no", worst_row, gate_off ? "yes" : "no")};
}

// Training runs shared by criteria 5-7.
struct SeedRuns {
  double baseline_mae = 0.0;
  double full_complete = 0.0;
  double full_missing = 0.0;
  double full_spearman = 0.0;
  double no_mia_mkd_missing = 0.0;
  double plain_spearman = 0.0;  // MIA+MKD off, delta = 0
  double full_seconds = 0.0;
};

double baseline_mae(const DatasetSplits& data) {
  const double mean = std::accumulate(data.train.labels.begin(), data.train.labels.end(), 0.0) /
                      static_cast<double>(data.train.size());
  double s = 0.0;
  for (double y : data.test.labels) s += std::abs(y - mean);
  return s / static_cast<double>(data.test.size());
}

SeedRuns train_seed(const DatasetSplits& data, std::uint64_t seed) {
  ModelConfig mc;
  mc.raw_dims = data.train.raw_dims;
  TrainConfig tc;
  tc.seed = seed;
  SeedRuns out;
  out.baseline_mae = baseline_mae(data);

  const AblationSpec full;
  const auto start = Clock::now();
  const auto rf = fit(data.train, data.val, mc, tc, full);
  out.full_seconds = seconds_since(start);
  out.full_complete = evaluate(data.test, rf.best.model, EvalMode::complete, full).metrics.mae;
  out.full_missing = evaluate(data.test, rf.best.model, EvalMode::missing, full).metrics.mae;
  out.full_spearman = label_distance_correlation(similarity_matrix(data.test, rf.best.model, full));

  AblationSpec no_mia_mkd;
  no_mia_mkd.use_mia = false;
  no_mia_mkd.use_mkd = false;
  const auto ra = fit(data.train, data.val, mc, tc, no_mia_mkd);
  out.no_mia_mkd_missing = evaluate(data.test, ra.best.model, EvalMode::missing, no_mia_mkd).metrics.mae;

  TrainConfig plain = tc;
  plain.weights.delta = 0.0;
  const auto rp = fit(data.train, data.val, mc, plain, no_mia_mkd);
  out.plain_spearman = label_distance_correlation(similarity_matrix(data.test, rp.best.model, no_mia_mkd));

  std::printf("  seed %llu: baseline %.4f | full complete %.4f missing %.4f spearman %.4f (%.0f s) | "
              "MIA+MKD off missing %.4f | MIA+MKD off, delta 0 spearman %.4f\n",
              static_cast<unsigned long long>(seed), out.baseline_mae, out.full_complete, out.full_missing,
              out.full_spearman, out.full_seconds, out.no_mia_mkd_missing, out.plain_spearman);
  std::fflush(stdout);
  return out;
}

// 8. Serial determinism and persistence.
Verdict determinism_and_persistence(const DatasetSplits& data) {
  const DatasetSplits tiny = generate_dataset(testing::tiny_synth_config(8));
  ModelConfig mc = testing::tiny_model_config(8);
  mc.raw_dims = tiny.train.raw_dims;
  TrainConfig tc;
  tc.epochs = 4;
  tc.patience = 4;
  tc.batch_size = 16;
  tc.seed = 8;
  auto r1 = fit(tiny.train, tiny.val, mc, tc, AblationSpec{});
  const auto r2 = fit(tiny.train, tiny.val, mc, tc, AblationSpec{});
  const bool history = history_csv(r1.history) == history_csv(r2.history);

  const fs::path dir = fs::temp_directory_path() / ("dfsd_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  save_dataset(data, dir / "data");
  const DatasetSplits back = load_dataset(dir / "data");
  bool dataset = true;
  for (const auto [x, y] : {std::pair{&data.train, &back.train}, {&data.val, &back.val}, {&data.test, &back.test}}) {
    dataset = dataset && same_bits(x->audio, y->audio) && same_bits(x->vision, y->vision) &&
              same_bits(x->text, y->text) && same_bits(x->sim_text, y->sim_text) && same_bits(x->labels, y->labels) &&
              x->raw_dims == y->raw_dims && x->seq_len == y->seq_len;
  }

  save_checkpoint(r1.best, dir / "ckpt");
  Checkpoint ck = load_checkpoint(dir / "ckpt");
  bool checkpoint = ck.epoch == r1.best.epoch && ck.optimizer.step == r1.best.optimizer.step &&
                    ck.best_val_mae == r1.best.best_val_mae;
  for (const auto& [name, leaf] : r1.best.model.params()) {
    checkpoint = checkpoint && bit_equal(leaf, ck.model.params().at(name)) &&
                 same_bits(r1.best.optimizer.first_moment.at(name), ck.optimizer.first_moment.at(name)) &&
                 same_bits(r1.best.optimizer.second_moment.at(name), ck.optimizer.second_moment.at(name));
  }
  // Resuming from the loaded copy continues exactly like the original.
  const auto order = batch_order(tiny.train.size(), tc.batch_size, 77);
  for (const auto& idx : order) {
    const Batch b = make_batch(tiny.train, idx);
    train_step(b, r1.best.model, r1.best.optimizer, tc.weights, AblationSpec{});
    train_step(b, ck.model, ck.optimizer, ck.train.weights, ck.ablation);
  }
  for (const auto& [name, leaf] : r1.best.model.params()) {
    checkpoint = checkpoint && bit_equal(leaf, ck.model.params().at(name));
  }
  fs::remove_all(dir);
  return {history && dataset && checkpoint,
          fmt("history CSV identical: %s; dataset round-trip bit-exact: %s; checkpoint round-trip and resume "
              "bit-exact: %s",
              history ? "yes" : "no", dataset ? "yes" : "no", checkpoint ? "yes" : "no")};
}

// 9. Gap arithmetic on the published pairs.
Verdict gap_arithmetic() {
  const PerformanceGap g = performance_gap({0.506, 87.6}, {0.550, 84.2});
  const bool ok = std::abs(g.mae - 0.044) < 1e-12 && std::abs(g.acc - 3.4) < 1e-12;
  return {ok, fmt("gap = (%.6f, %.6f), expected (0.044, 3.4)", g.mae, g.acc)};
}

int run() {
  set_verbosity(Verbosity::quiet);
  report(1, "gradient correctness", gradient_correctness());
  report(2, "RNC oracle equivalence", rnc_equivalence());
  report(3, "detach contract", detach_contract());
  report(4, "structural identities", structural_identities());

  const DatasetSplits data = generate_dataset(SynthConfig{});
  std::vector<SeedRuns> runs;
  for (std::uint64_t seed : {0, 1, 2}) runs.push_back(train_seed(data, seed));
  auto mean = [&](double SeedRuns::*field) {
    double s = 0.0;
    for (const auto& r : runs) s += r.*field;
    return s / static_cast<double>(runs.size());
  };
  double slowest = 0.0;
  for (const auto& r : runs) slowest = std::max(slowest, r.full_seconds);

  const double base = mean(&SeedRuns::baseline_mae);
  const double full_c = mean(&SeedRuns::full_complete);
  report(5, "end-to-end learning",
         {full_c <= 0.6 * base && slowest < 600.0,
          fmt("mean test MAE %.4f vs 0.6 x baseline %.4f = %.4f; slowest seed %.0f s", full_c, base, 0.6 * base,
              slowest)});

  const double full_m = mean(&SeedRuns::full_missing);
  const double abl_m = mean(&SeedRuns::no_mia_mkd_missing);
  report(6, "missing-modality robustness",
         {full_m < abl_m, fmt("mean missing-mode MAE full %.4f < MIA+MKD off %.4f", full_m, abl_m)});

  const double sp_full = mean(&SeedRuns::full_spearman);
  const double sp_plain = mean(&SeedRuns::plain_spearman);
  report(7, "representation geometry",
         {sp_full > 0.3 && sp_full > sp_plain,
          fmt("mean Spearman full %.4f (> 0.3), MIA+MKD off with delta 0 %.4f", sp_full, sp_plain)});

  report(8, "determinism and persistence", determinism_and_persistence(data));
  report(9, "gap arithmetic", gap_arithmetic());
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}

}  // namespace
}  // namespace dfsd

int main() { return dfsd::run(); }
