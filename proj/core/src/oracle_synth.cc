// Copyright 2026 The infoverse Authors.
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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "infoverse/error.h"
#include "infoverse/oracle.h"
#include "infoverse/rng.h"

namespace infoverse {
namespace oracle {
namespace {

constexpr double kClipLow = 0.01;
constexpr double kClipHigh = 0.99;
constexpr char kNoiseTag[] = "planted_noise=[";

double Clip(double v) { return std::clamp(v, kClipLow, kClipHigh); }

std::vector<double> UnitCenter(Rng& rng, int64_t dims, double scale) {
  std::vector<double> c(static_cast<size_t>(dims));
  double norm = 0.0;
  for (double& v : c) {
    v = rng.Normal();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : c) v = v / norm * scale;
  return c;
}

// Writes one probability row with `conf` on the observed label and the rest
// split by the fixed per-sample weights.
void FillRow(double conf, int32_t label, const std::vector<double>& weights,
             std::vector<double>& row) {
  for (size_t k = 0; k < row.size(); ++k) {
    row[k] = static_cast<int32_t>(k) == label ? conf : (1.0 - conf) * weights[k];
  }
}

void StoreLogRow(const std::vector<double>& row, FloatTensor& t, int64_t layer,
                 int64_t i) {
  for (size_t k = 0; k < row.size(); ++k) {
    t.at(layer, i, static_cast<int64_t>(k)) = static_cast<float>(std::log(row[k]));
  }
}

}  // namespace

void SynthConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(n_samples >= 1, "n_samples must be >= 1");
  require(n_classes >= 2, "n_classes must be >= 2");
  require(epochs >= 1, "epochs must be >= 1");
  require(seeds >= 1, "seeds must be >= 1");
  require(mc_passes >= 1, "mc_passes must be >= 1");
  require(clf_dim >= 1 && sent_dim >= 1, "embedding dims must be >= 1");
  require(planted_noise_fraction >= 0.0 && planted_noise_fraction < 0.5,
          "planted_noise_fraction must lie in [0, 0.5)");
  require(rate_spread >= 0.0 && rate_spread < 1.0, "rate_spread must lie in [0, 1)");
  require(confidence_ceiling + epoch_jitter <= kClipHigh &&
              std::min(noisy_floor, 1.0 / static_cast<double>(n_classes)) -
                      epoch_jitter >= kClipLow,
          "ramp plus jitter must stay inside [0.01, 0.99]");
}

double ExpectedRampMean(double floor, double ceiling, double base_rate,
                        double spread, int64_t epochs) {
  const double lo = base_rate * (1.0 - spread);
  const double hi = base_rate * (1.0 + spread);
  double total = 0.0;
  for (int64_t e = 1; e <= epochs; ++e) {
    const double x = static_cast<double>(e);
    const double mean_decay = spread > 0.0
                                  ? (std::exp(-lo * x) - std::exp(-hi * x)) /
                                        ((hi - lo) * x)
                                  : std::exp(-base_rate * x);
    total += floor + (ceiling - floor) * (1.0 - mean_decay);
  }
  return total / static_cast<double>(epochs);
}

RunBundle GenerateBundle(const SynthConfig& cfg) {
  cfg.Validate();
  Rng rng(cfg.rng_seed);
  const int64_t n = cfg.n_samples;
  const int64_t c = cfg.n_classes;

  std::vector<std::vector<double>> clf_centers;
  std::vector<std::vector<double>> sent_centers;
  for (int64_t k = 0; k < c; ++k) {
    clf_centers.push_back(UnitCenter(rng, cfg.clf_dim, cfg.cluster_separation));
  }
  for (int64_t k = 0; k < c; ++k) {
    sent_centers.push_back(
        UnitCenter(rng, cfg.sent_dim, 0.5 * cfg.cluster_separation));
  }

  const auto n_noisy =
      static_cast<int64_t>(std::floor(cfg.planted_noise_fraction * static_cast<double>(n)));
  std::vector<int64_t> noisy = rng.SampleWithoutReplacement(n, n_noisy);
  std::sort(noisy.begin(), noisy.end());
  std::vector<bool> is_noisy(static_cast<size_t>(n), false);
  for (int64_t i : noisy) is_noisy[i] = true;

  RunBundle b;
  b.n_samples = n;
  b.n_classes = c;
  b.static_probs = FloatTensor({n, c});
  b.epoch_logprobs = FloatTensor({cfg.epochs, n, c});
  b.seed_logprobs = FloatTensor({cfg.seeds, n, c});
  if (cfg.with_mc) b.mc_logprobs = FloatTensor({cfg.mc_passes, n, c});
  b.clf_embedding = FloatTensor({n, cfg.clf_dim});
  if (cfg.with_sent_embedding) b.sent_embedding = FloatTensor({n, cfg.sent_dim});
  std::vector<int32_t> labels(static_cast<size_t>(n));
  std::vector<std::vector<float>> tokens;

  std::vector<double> row(static_cast<size_t>(c));
  std::vector<double> weights(static_cast<size_t>(c));
  for (int64_t i = 0; i < n; ++i) {
    const auto truth = static_cast<int32_t>(i % c);
    int32_t label = truth;
    if (is_noisy[i]) {
      label = static_cast<int32_t>(
          (truth + 1 + static_cast<int64_t>(rng.UniformInt(c - 1))) % c);
    }
    labels[i] = label;

    double wsum = 0.0;
    for (int64_t k = 0; k < c; ++k) {
      weights[k] = k == label ? 0.0 : rng.Uniform(0.2, 1.0);
      // A mislabelled sample's residual mass leans towards its true class.
      if (is_noisy[i] && k == truth) weights[k] += 3.0;
      wsum += weights[k];
    }
    for (double& w : weights) w /= wsum;

    const double floor =
        is_noisy[i] ? cfg.noisy_floor : 1.0 / static_cast<double>(c);
    const double base = is_noisy[i] ? cfg.noisy_rate : cfg.clean_rate;
    const double rate =
        base * rng.Uniform(1.0 - cfg.rate_spread, 1.0 + cfg.rate_spread);
    double final_conf = 0.0;
    for (int64_t e = 0; e < cfg.epochs; ++e) {
      const double ramp =
          floor + (cfg.confidence_ceiling - floor) *
                      (1.0 - std::exp(-rate * static_cast<double>(e + 1)));
      final_conf = Clip(ramp + rng.Uniform(-cfg.epoch_jitter, cfg.epoch_jitter));
      FillRow(final_conf, label, weights, row);
      StoreLogRow(row, b.epoch_logprobs, e, i);
    }
    FillRow(final_conf, label, weights, row);
    for (int64_t k = 0; k < c; ++k) b.static_probs.at(i, k) = static_cast<float>(row[k]);

    const double seed_jitter = is_noisy[i] ? cfg.noisy_seed_jitter : cfg.seed_jitter;
    for (int64_t t = 0; t < cfg.seeds; ++t) {
      FillRow(Clip(final_conf + rng.Uniform(-seed_jitter, seed_jitter)), label,
              weights, row);
      StoreLogRow(row, b.seed_logprobs, t, i);
    }
    if (cfg.with_mc) {
      for (int64_t m = 0; m < cfg.mc_passes; ++m) {
        FillRow(Clip(final_conf + rng.Uniform(-cfg.mc_jitter, cfg.mc_jitter)),
                label, weights, row);
        StoreLogRow(row, *b.mc_logprobs, m, i);
      }
    }

    for (int64_t d = 0; d < cfg.clf_dim; ++d) {
      b.clf_embedding.at(i, d) =
          static_cast<float>(clf_centers[truth][d] + rng.Normal());
    }
    if (cfg.with_sent_embedding) {
      for (int64_t d = 0; d < cfg.sent_dim; ++d) {
        b.sent_embedding->at(i, d) =
            static_cast<float>(sent_centers[truth][d] + rng.Normal());
      }
    }
    if (cfg.with_tokens) {
      std::vector<float> seq(3 + rng.UniformInt(10));
      for (float& v : seq) v = static_cast<float>(-rng.Uniform(0.05, 6.0));
      tokens.push_back(std::move(seq));
    }
  }
  if (cfg.with_labels) b.labels = std::move(labels);
  if (cfg.with_tokens) b.token_logprobs = TokenLogprobs::FromSequences(tokens);

  std::ostringstream notes;
  notes << "synth rng_seed=" << cfg.rng_seed << " " << kNoiseTag;
  for (size_t j = 0; j < noisy.size(); ++j) notes << (j ? "," : "") << noisy[j];
  notes << "]";
  b.notes = notes.str();
  return b;
}

std::vector<int64_t> PlantedNoiseIndices(const RunBundle& bundle) {
  std::vector<int64_t> out;
  const auto pos = bundle.notes.find(kNoiseTag);
  if (pos == std::string::npos) return out;
  const auto end = bundle.notes.find(']', pos);
  std::stringstream ss(bundle.notes.substr(
      pos + sizeof(kNoiseTag) - 1, end - pos - (sizeof(kNoiseTag) - 1)));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoll(item));
  }
  return out;
}

}  // namespace oracle
}  // namespace infoverse
