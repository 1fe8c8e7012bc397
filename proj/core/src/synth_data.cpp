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

#include "dfsd/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "archive.hpp"
#include "dfsd/error.hpp"
#include "json_convert.hpp"
#include "seeding.hpp"

namespace dfsd {

namespace {

// Norm of the label direction: y = 3 tanh(w_y . z) with |w_y| = kLabelScale.
constexpr double kLabelScale = 0.7;
// Fraction of |w_y|^2 carried by the text-only latent dims.
constexpr double kTextOnlyShare = 0.3;
// Signal gain per modality (audio, vision, text); text is the strongest.
constexpr std::array<double, 3> kSignalGain = {0.7, 0.6, 1.0};
// Salts separating the random streams drawn from one seed.
constexpr std::uint64_t kSaltGlobal = 0x6a09e667f3bcc908ULL;
constexpr std::uint64_t kSaltDegrade = 0xbb67ae8584caa73bULL;

using seeding::splitmix64;

std::uint64_t sample_seed(std::uint64_t seed, Split split, std::size_t i) {
  return splitmix64(splitmix64(seed ^ (static_cast<std::uint64_t>(split) + 1) * 0x632be59bd9b4e019ULL) + i);
}

// Latent dims visible to a modality: text all, audio the leading 3/4,
// vision [1/4, 5/8). The trailing quarter reaches the label through text only.
bool visible(Modality m, std::size_t dim, std::size_t latent) {
  if (latent == 1 || m == Modality::text) return true;
  if (m == Modality::audio) return 4 * dim < 3 * latent;
  return 4 * dim >= latent && 8 * dim < 5 * latent;
}

bool text_only(std::size_t dim, std::size_t latent) {
  return !visible(Modality::audio, dim, latent) && !visible(Modality::vision, dim, latent);
}

struct Generator {
  std::vector<double> label_dir;                    // [L]
  std::array<std::vector<double>, 3> maps;          // [L x D_raw_m]
  std::vector<double> degrade_mixing;               // [D_raw_a x D_raw_t]
};

Generator make_generator(const SynthConfig& c) {
  std::mt19937_64 rng(splitmix64(c.seed ^ kSaltGlobal));
  std::normal_distribution<double> normal(0.0, 1.0);
  Generator g;
  const std::size_t L = c.latent_dim;
  g.label_dir.resize(L);
  std::array<double, 2> block_sq = {0.0, 0.0};  // shared, text-only
  for (std::size_t l = 0; l < L; ++l) {
    g.label_dir[l] = normal(rng);
    block_sq[text_only(l, L)] += g.label_dir[l] * g.label_dir[l];
  }
  const double share = block_sq[1] > 0.0 ? kTextOnlyShare : 0.0;
  const std::array<double, 2> block_scale = {kLabelScale * std::sqrt((1.0 - share) / block_sq[0]),
                                             block_sq[1] > 0.0 ? kLabelScale * std::sqrt(share / block_sq[1]) : 0.0};
  for (std::size_t l = 0; l < L; ++l) g.label_dir[l] *= block_scale[text_only(l, L)];

  for (Modality m : kModalities) {
    const std::size_t d = c.raw_dims[index(m)];
    std::size_t n_visible = 0;
    for (std::size_t l = 0; l < L; ++l) n_visible += visible(m, l, L);
    const double sd = kSignalGain[index(m)] / std::sqrt(static_cast<double>(n_visible));
    auto& map = g.maps[index(m)];
    map.assign(L * d, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
      for (std::size_t j = 0; j < d; ++j) {
        const double w = normal(rng) * sd;
        if (visible(m, l, L)) map[l * d + j] = w;
      }
    }
  }
  const std::size_t da = c.raw_dims[0];
  const std::size_t dt = c.raw_dims[2];
  g.degrade_mixing.resize(da * dt);
  const double sd = 1.0 / std::sqrt(static_cast<double>(da));
  for (auto& v : g.degrade_mixing) v = normal(rng) * sd;
  return g;
}

Dataset generate_split(const SynthConfig& c, const Generator& g, const TextDegrader& degrader, Split split,
                       std::size_t n) {
  Dataset ds;
  ds.split = split;
  ds.config = c;
  ds.seq_len = c.seq_len;
  ds.raw_dims = c.raw_dims;
  const std::size_t S = c.seq_len;
  const std::size_t L = c.latent_dim;
  std::array<std::vector<double>*, 3> out = {&ds.audio, &ds.vision, &ds.text};
  for (Modality m : kModalities) out[index(m)]->reserve(n * S * c.raw_dims[index(m)]);
  ds.sim_text.reserve(n * S * c.raw_dims[2]);
  ds.labels.reserve(n);

  std::vector<double> z(L);
  std::array<std::vector<double>, 3> clean;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t seed = sample_seed(c.seed, split, i);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : z) v = normal(rng);
    const double s = std::inner_product(z.begin(), z.end(), g.label_dir.begin(), 0.0);
    ds.labels.push_back(std::clamp(3.0 * std::tanh(s), -3.0, 3.0));

    for (Modality m : kModalities) {
      const std::size_t d = c.raw_dims[index(m)];
      auto& row = clean[index(m)];
      row.assign(d, 0.0);
      for (std::size_t l = 0; l < L; ++l)
        for (std::size_t j = 0; j < d; ++j) row[j] += z[l] * g.maps[index(m)][l * d + j];
      const double sigma = c.noise_std[index(m)];
      auto& dst = *out[index(m)];
      for (std::size_t t = 0; t < S; ++t)
        for (std::size_t j = 0; j < d; ++j) dst.push_back(row[j] + sigma * normal(rng));
    }
    const std::size_t da = c.raw_dims[0] * S;
    const std::size_t dt = c.raw_dims[2] * S;
    const std::span<const double> audio(ds.audio.data() + i * da, da);
    const std::span<const double> text(ds.text.data() + i * dt, dt);
    const auto sim = degrader.degrade(text, audio, S, c.text_degradation, seed ^ kSaltDegrade);
    ds.sim_text.insert(ds.sim_text.end(), sim.begin(), sim.end());
  }
  return ds;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_train < 1) throw ConfigError("synth.n_train must be >= 1");
  if (n_val < 1) throw ConfigError("synth.n_val must be >= 1");
  if (n_test < 1) throw ConfigError("synth.n_test must be >= 1");
  if (seq_len < 1) throw ConfigError("synth.seq_len must be >= 1");
  if (latent_dim < 1) throw ConfigError("synth.latent_dim must be >= 1");
  const char* names[] = {"raw_audio", "raw_vision", "raw_text"};
  const char* sigmas[] = {"sigma_audio", "sigma_vision", "sigma_text"};
  for (std::size_t m = 0; m < 3; ++m) {
    if (raw_dims[m] < 1) throw ConfigError(std::string("synth.") + names[m] + " must be >= 1");
    if (!(noise_std[m] >= 0.0) || !std::isfinite(noise_std[m])) {
      throw ConfigError(std::string("synth.") + sigmas[m] + " must be finite and >= 0");
    }
  }
  if (!(text_degradation >= 0.0 && text_degradation <= 1.0)) {
    throw ConfigError("synth.text_degradation must lie in [0, 1]");
  }
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::train:
      return "train";
    case Split::val:
      return "val";
    case Split::test:
      return "test";
  }
  return "?";
}

std::span<const double> Dataset::features(Modality m, std::size_t i) const {
  const std::vector<double>* src = m == Modality::audio ? &audio : m == Modality::vision ? &vision : &text;
  const std::size_t n = row_elements(m);
  return {src->data() + i * n, n};
}

std::span<const double> Dataset::simulated_text(std::size_t i) const {
  const std::size_t n = row_elements(Modality::text);
  return {sim_text.data() + i * n, n};
}

Sample Dataset::sample(std::size_t i) const {
  auto vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
  return {vec(features(Modality::audio, i)), vec(features(Modality::vision, i)), vec(features(Modality::text, i)),
          vec(simulated_text(i)), labels.at(i)};
}

TextDegrader::TextDegrader(std::size_t audio_dim, std::size_t text_dim, std::vector<double> mixing, double noise_std)
    : audio_dim_(audio_dim), text_dim_(text_dim), mixing_(std::move(mixing)), noise_std_(noise_std) {
  if (mixing_.size() != audio_dim_ * text_dim_) {
    throw ShapeError("TextDegrader: mixing map has " + std::to_string(mixing_.size()) + " entries, expected " +
                     std::to_string(audio_dim_ * text_dim_));
  }
}

TextDegrader TextDegrader::random(std::size_t audio_dim, std::size_t text_dim, double noise_std, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(audio_dim)));
  std::vector<double> mixing(audio_dim * text_dim);
  for (auto& v : mixing) v = normal(rng);
  return TextDegrader(audio_dim, text_dim, std::move(mixing), noise_std);
}

std::vector<double> TextDegrader::degrade(std::span<const double> text, std::span<const double> audio,
                                          std::size_t seq_len, double rho, std::uint64_t sample_seed) const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("degrade_text: rho must lie in [0, 1]");
  if (text.size() != seq_len * text_dim_ || audio.size() != seq_len * audio_dim_) {
    throw ShapeError("degrade_text: feature sizes do not match sequence length " + std::to_string(seq_len));
  }
  std::vector<double> out(text.begin(), text.end());
  if (rho == 0.0) return out;

  std::vector<double> audio_mean(audio_dim_, 0.0);
  for (std::size_t t = 0; t < seq_len; ++t)
    for (std::size_t j = 0; j < audio_dim_; ++j) audio_mean[j] += audio[t * audio_dim_ + j];
  for (auto& v : audio_mean) v /= static_cast<double>(seq_len);
  std::vector<double> leak(text_dim_, 0.0);
  for (std::size_t j = 0; j < audio_dim_; ++j)
    for (std::size_t k = 0; k < text_dim_; ++k) leak[k] += audio_mean[j] * mixing_[j * text_dim_ + k];

  std::mt19937_64 rng(sample_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t t = 0; t < seq_len; ++t) {
    for (std::size_t k = 0; k < text_dim_; ++k) {
      const double eps = noise_std_ * normal(rng);
      auto& v = out[t * text_dim_ + k];
      v = (1.0 - rho) * v + rho * (eps + leak[k]);
    }
  }
  return out;
}

DatasetSplits generate_dataset(const SynthConfig& config) {
  config.validate();
  const Generator g = make_generator(config);
  const TextDegrader degrader(config.raw_dims[0], config.raw_dims[2], g.degrade_mixing, config.noise_std[2]);
  return {generate_split(config, g, degrader, Split::train, config.n_train),
          generate_split(config, g, degrader, Split::val, config.n_val),
          generate_split(config, g, degrader, Split::test, config.n_test)};
}

namespace {

constexpr const char* kDatasetFormat = "dfsd-dataset";

const std::array<std::pair<const char*, std::size_t>, 4> kFeatureFields = {
    {{"audio", 0}, {"vision", 1}, {"text", 2}, {"sim_text", 2}}};

template <class D>
auto& field_ref(D& ds, const std::string& name) {
  if (name == "audio") return ds.audio;
  if (name == "vision") return ds.vision;
  if (name == "text") return ds.text;
  if (name == "sim_text") return ds.sim_text;
  return ds.labels;
}

}  // namespace

void save_dataset(const DatasetSplits& data, const std::filesystem::path& dir) {
  archive::ArrayMap arrays;
  archive::json splits = archive::json::object();
  for (const Dataset* ds : {&data.train, &data.val, &data.test}) {
    const std::string split(split_name(ds->split));
    const std::size_t n = ds->size();
    splits[split] = {{"count", n},
                     {"seq_len", ds->seq_len},
                     {"raw_dims", ds->raw_dims}};
    for (const auto& [field, modality] : kFeatureFields) {
      const auto& values = field_ref(*ds, field);
      arrays[split + "." + field] = {{n, ds->seq_len, ds->raw_dims[modality]}, values};
    }
    arrays[split + ".labels"] = {{n}, ds->labels};
  }
  archive::json meta = {{"format", kDatasetFormat},
                        {"version", 1},
                        {"seed", data.train.config.seed},
                        {"config", jsonio::to_json(data.train.config)},
                        {"splits", splits}};
  archive::write_dir(dir, std::move(meta), arrays);
}

DatasetSplits load_dataset(const std::filesystem::path& dir) {
  auto loaded = archive::read_dir(dir, kDatasetFormat);
  SynthConfig config;
  try {
    config = jsonio::synth_from_json(loaded.meta.at("config"));
  } catch (const archive::json::exception& e) {
    throw IoError(dir.string() + ": manifest lacks config: " + e.what());
  } catch (const ConfigError& e) {
    throw IoError(dir.string() + ": manifest config invalid: " + e.what());
  }

  DatasetSplits out;
  for (Split split : {Split::train, Split::val, Split::test}) {
    Dataset& ds = split == Split::train ? out.train : split == Split::val ? out.val : out.test;
    const std::string name(split_name(split));
    std::size_t n = 0;
    try {
      const auto& entry = loaded.meta.at("splits").at(name);
      n = entry.at("count").get<std::size_t>();
      ds.seq_len = entry.at("seq_len").get<std::size_t>();
      ds.raw_dims = entry.at("raw_dims").get<std::array<std::size_t, 3>>();
    } catch (const archive::json::exception& e) {
      throw IoError(dir.string() + ": manifest split '" + name + "' malformed: " + e.what());
    }
    ds.split = split;
    ds.config = config;
    for (const auto& [field, modality] : kFeatureFields) {
      const std::string key = name + "." + field;
      auto it = loaded.arrays.find(key);
      if (it == loaded.arrays.end()) throw IoError("dataset: tensor '" + key + "' missing from manifest");
      const Shape expected = {n, ds.seq_len, ds.raw_dims[modality]};
      if (it->second.shape != expected) {
        throw IoError("dataset: tensor '" + key + "' has shape " + shape_str(it->second.shape) + ", split header says " +
                      shape_str(expected));
      }
      field_ref(ds, field) = std::move(it->second.values);
    }
    const std::string key = name + ".labels";
    auto it = loaded.arrays.find(key);
    if (it == loaded.arrays.end()) throw IoError("dataset: tensor '" + key + "' missing from manifest");
    if (it->second.shape != Shape{n}) {
      throw IoError("dataset: tensor '" + key + "' has shape " + shape_str(it->second.shape) + ", expected [" +
                    std::to_string(n) + "]");
    }
    ds.labels = std::move(it->second.values);
  }
  return out;
}

std::vector<std::vector<std::size_t>> batch_order(std::size_t n, std::size_t batch_size,
                                                  std::optional<std::uint64_t> shuffle_seed) {
  if (batch_size < 1) throw std::invalid_argument("batch_order: batch_size must be >= 1");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    std::shuffle(idx.begin(), idx.end(), rng);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    batches.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(start), idx.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

Batch make_batch(const Dataset& data, std::span<const std::size_t> indices) {
  if (indices.empty()) throw std::invalid_argument("make_batch: empty index list");
  const std::size_t b = indices.size();
  auto gather = [&](auto&& rows, std::size_t width) {
    std::vector<double> out;
    out.reserve(b * data.seq_len * width);
    for (std::size_t i : indices) {
      const auto r = rows(i);
      out.insert(out.end(), r.begin(), r.end());
    }
    return Tensor::from_values({b, data.seq_len, width}, std::move(out));
  };
  Batch batch;
  for (Modality m : kModalities) {
    batch.real[index(m)] = gather([&](std::size_t i) { return data.features(m, i); }, data.raw_dims[index(m)]);
  }
  batch.sim_text = gather([&](std::size_t i) { return data.simulated_text(i); }, data.raw_dims[2]);
  batch.label_values.reserve(b);
  for (std::size_t i : indices) batch.label_values.push_back(data.labels.at(i));
  batch.labels = Tensor::from_values({b}, batch.label_values);
  return batch;
}

}  // namespace dfsd
