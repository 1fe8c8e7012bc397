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

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "dfsd/error.hpp"
#include "dfsd/synth_data.hpp"
#include "fixtures.hpp"

namespace dfsd {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dfsd_synth_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

Eigen::MatrixXd design(const Dataset& ds, Modality m) {
  const std::size_t cols = ds.row_elements(m);
  Eigen::MatrixXd x(ds.size(), cols + 1);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto f = ds.features(m, i);
    for (std::size_t c = 0; c < cols; ++c) x(i, c) = f[c];
    x(i, cols) = 1.0;
  }
  return x;
}

Eigen::VectorXd labels(const Dataset& ds) { return Eigen::Map<const Eigen::VectorXd>(ds.labels.data(), ds.size()); }

// Ridge fit on train, MAE on val.
double ridge_probe_mae(const DatasetSplits& data, Modality m, double lambda) {
  const Eigen::MatrixXd x = design(data.train, m);
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += lambda;
  const Eigen::VectorXd w = gram.ldlt().solve(x.transpose() * labels(data.train));
  const Eigen::VectorXd pred = design(data.val, m) * w;
  return (pred - labels(data.val)).cwiseAbs().mean();
}

TEST(SynthData, Deterministic) {
  const auto a = generate_dataset(testing::tiny_synth_config(3));
  const auto b = generate_dataset(testing::tiny_synth_config(3));
  EXPECT_TRUE(a == b);
  const auto c = generate_dataset(testing::tiny_synth_config(4));
  EXPECT_FALSE(a.train.labels == c.train.labels);
}

TEST(SynthData, SizesAndLabelRange) {
  const auto cfg = testing::tiny_synth_config(5);
  const auto d = generate_dataset(cfg);
  EXPECT_EQ(d.train.size(), cfg.n_train);
  EXPECT_EQ(d.val.size(), cfg.n_val);
  EXPECT_EQ(d.test.size(), cfg.n_test);
  EXPECT_EQ(d.train.audio.size(), cfg.n_train * cfg.seq_len * cfg.raw_dims[0]);
  EXPECT_EQ(d.test.sim_text.size(), cfg.n_test * cfg.seq_len * cfg.raw_dims[2]);
  double lo = 0.0, hi = 0.0;
  for (const Dataset* ds : {&d.train, &d.val, &d.test}) {
    for (double y : ds->labels) {
      EXPECT_GE(y, -3.0);
      EXPECT_LE(y, 3.0);
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  }
  // Covers both signs with some spread.
  EXPECT_LT(lo, -1.0);
  EXPECT_GT(hi, 1.0);
}

TEST(SynthData, NoiselessTextIsLinearInLatent) {
  SynthConfig cfg = testing::tiny_synth_config(6);
  cfg.noise_std = {0.0, 0.0, 0.0};
  cfg.seq_len = 1;
  cfg.n_train = 400;
  cfg.raw_dims = {6, 6, 12};
  const auto d = generate_dataset(cfg);
  const Eigen::MatrixXd x = design(d.train, Modality::text);
  const Eigen::VectorXd y = labels(d.train);
  const Eigen::VectorXd w = x.colPivHouseholderQr().solve(y);
  const double ss_res = (x * w - y).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
  EXPECT_GT(1.0 - ss_res / ss_tot, 0.95);
}

TEST(SynthData, TextIsTheStrongestModality) {
  for (std::uint64_t seed : {0, 1, 2, 3, 4}) {
    SynthConfig cfg;
    cfg.seed = seed;
    const auto d = generate_dataset(cfg);
    const double text = ridge_probe_mae(d, Modality::text, 1.0);
    const double audio = ridge_probe_mae(d, Modality::audio, 1.0);
    const double vision = ridge_probe_mae(d, Modality::vision, 1.0);
    EXPECT_LT(text, audio) << "seed " << seed;
    EXPECT_LE(audio, vision) << "seed " << seed;
  }
}

TEST(TextDegrader, ZeroRhoIsIdentity) {
  testing::Rng rng(7);
  const auto deg = TextDegrader::random(4, 6, 0.2, 11);
  const auto text = testing::normal_values(3 * 6, rng);
  const auto audio = testing::normal_values(3 * 4, rng);
  EXPECT_EQ(deg.degrade(text, audio, 3, 0.0, 5), text);

  SynthConfig cfg = testing::tiny_synth_config(8);
  cfg.text_degradation = 0.0;
  const auto d = generate_dataset(cfg);
  EXPECT_EQ(d.train.sim_text, d.train.text);
}

TEST(TextDegrader, GapGrowsWithRho) {
  testing::Rng rng(8);
  const auto deg = TextDegrader::random(4, 6, 0.2, 12);
  const auto text = testing::normal_values(5 * 6, rng);
  const auto audio = testing::normal_values(5 * 4, rng);
  double last = -1.0;
  for (double rho : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto sim = deg.degrade(text, audio, 5, rho, 99);
    double s = 0.0;
    for (std::size_t i = 0; i < sim.size(); ++i) s += (sim[i] - text[i]) * (sim[i] - text[i]);
    EXPECT_GE(s, last) << "rho=" << rho;
    last = s;
  }
  EXPECT_EQ(deg.degrade(text, audio, 5, 0.6, 3), deg.degrade(text, audio, 5, 0.6, 3));
  EXPECT_NE(deg.degrade(text, audio, 5, 0.6, 3), deg.degrade(text, audio, 5, 0.6, 4));
  EXPECT_THROW(deg.degrade(text, audio, 5, 1.5, 3), DomainError);
  EXPECT_THROW(deg.degrade(text, audio, 4, 0.5, 3), ShapeError);
}

TEST(SynthData, ConfigValidation) {
  SynthConfig cfg;
  cfg.text_degradation = 1.2;
  EXPECT_THROW(generate_dataset(cfg), ConfigError);
  cfg = {};
  cfg.seq_len = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.noise_std[1] = -0.1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(SynthData, SaveLoadRoundTripIsBitExact) {
  const auto d = generate_dataset(testing::tiny_synth_config(9));
  const fs::path dir = scratch_dir("roundtrip");
  save_dataset(d, dir);
  const auto back = load_dataset(dir);
  EXPECT_TRUE(back == d);
  fs::remove_all(dir);
}

TEST(SynthData, TruncatedTensorIsNamed) {
  const auto d = generate_dataset(testing::tiny_synth_config(10));
  const fs::path dir = scratch_dir("truncated");
  save_dataset(d, dir);
  fs::resize_file(dir / "val.vision.bin", fs::file_size(dir / "val.vision.bin") - 8);
  try {
    load_dataset(dir);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("val.vision"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
}

TEST(SynthData, EditedManifestDimsAreRejected) {
  const auto d = generate_dataset(testing::tiny_synth_config(11));
  const fs::path dir = scratch_dir("manifest");
  save_dataset(d, dir);
  nlohmann::json manifest;
  std::ifstream(dir / "manifest.json") >> manifest;
  manifest["splits"]["train"]["raw_dims"][0] = 7;
  std::ofstream(dir / "manifest.json") << manifest.dump(2);
  try {
    load_dataset(dir);
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("train.audio"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_dataset(dir / "missing"), IoError);
  fs::remove_all(dir);
}

TEST(BatchOrder, PartitionAndShortBatch) {
  const auto batches = batch_order(10, 4, 123);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches.back().size(), 2u);
  std::multiset<std::size_t> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  EXPECT_EQ(seen.size(), 10u);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(seen.count(i), 1u);
}

TEST(BatchOrder, UnshuffledAndSeeded) {
  const auto one = batch_order(5, 5, std::nullopt);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(batch_order(5, 50, std::nullopt).size(), 1u);
  EXPECT_EQ(batch_order(20, 3, 1), batch_order(20, 3, 1));
  EXPECT_NE(batch_order(20, 3, 1), batch_order(20, 3, 2));
}

TEST(Batch, GathersRows) {
  const auto d = generate_dataset(testing::tiny_synth_config(12));
  const std::vector<std::size_t> idx = {4, 0, 7};
  const Batch b = make_batch(d.train, idx);
  EXPECT_EQ(b.real[2].shape(), (Shape{3, 3, 6}));
  EXPECT_EQ(b.sim_text.shape(), (Shape{3, 3, 6}));
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(b.labels.values()[k], d.train.labels[idx[k]]);
    EXPECT_EQ(b.label_values[k], d.train.labels[idx[k]]);
    const auto f = d.train.features(Modality::vision, idx[k]);
    for (std::size_t j = 0; j < f.size(); ++j) EXPECT_EQ(b.real[1].values()[k * f.size() + j], f[j]);
  }
}

}  // namespace
}  // namespace dfsd
