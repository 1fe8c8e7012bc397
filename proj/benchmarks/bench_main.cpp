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

#include <benchmark/benchmark.h>

#include <random>

#include "dfsd/losses.hpp"
#include "dfsd/ops.hpp"
#include "dfsd/train.hpp"

namespace dfsd {
namespace {

DatasetSplits small_data() {
  SynthConfig c;
  c.n_train = 256;
  c.n_val = 32;
  c.n_test = 32;
  return generate_dataset(c);
}

// One optimizer step on a default-size model, batch size from the range.
void BM_TrainStep(benchmark::State& state) {
  static const DatasetSplits data = small_data();
  ModelConfig mc;
  mc.raw_dims = data.train.raw_dims;
  Model model = Model::create(mc, 1);
  AdamState opt = AdamState::create(model.params(), {});
  const auto order = batch_order(data.train.size(), static_cast<std::size_t>(state.range(0)), 3);
  const Batch batch = make_batch(data.train, order.front());
  for (auto _ : state) {
    const LossReport r = train_step(batch, model, opt, LossWeights{}, AblationSpec{});
    benchmark::DoNotOptimize(r.total);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DoubleFlowForward(benchmark::State& state) {
  static const DatasetSplits data = small_data();
  ModelConfig mc;
  mc.raw_dims = data.train.raw_dims;
  const Model model = Model::create(mc, 1);
  const auto order = batch_order(data.train.size(), 32, std::nullopt);
  const Batch batch = make_batch(data.train, order.front());
  NoGradGuard no_grad;
  for (auto _ : state) {
    const auto flows = run_double_flow(batch, model, AblationSpec{});
    benchmark::DoNotOptimize(flows.missing.prediction.values().data());
  }
}
BENCHMARK(BM_DoubleFlowForward)->Unit(benchmark::kMillisecond);

Tensor random_reps(std::size_t m, std::size_t d, bool grad) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<double> v(m * d);
  for (auto& x : v) x = normal(rng);
  return Tensor::from_values({m, d}, std::move(v), grad);
}

std::vector<double> random_labels(std::size_t m) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> y(m / 2);
  for (auto& x : y) x = u(rng);
  y.insert(y.end(), y.begin(), y.end());
  return y;
}

// M = 2N rows of width 32.
void BM_RncLoss(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Tensor reps = random_reps(m, 32, false);
  const auto y = random_labels(m);
  for (auto _ : state) benchmark::DoNotOptimize(rnc_loss(reps, y, 2.0).item());
}
BENCHMARK(BM_RncLoss)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

void BM_RncLossBackward(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Tensor reps = random_reps(m, 32, true);
  const auto y = random_labels(m);
  for (auto _ : state) {
    const GradMap g = backward(rnc_loss(reps, y, 2.0));
    benchmark::DoNotOptimize(g.size());
  }
}
BENCHMARK(BM_RncLossBackward)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace dfsd

BENCHMARK_MAIN();
