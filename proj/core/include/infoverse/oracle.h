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

#ifndef INFOVERSE_ORACLE_H_
#define INFOVERSE_ORACLE_H_

#include <cstdint>
#include <vector>

#include "infoverse/bundle.h"
#include "infoverse/measures.h"

namespace infoverse {
namespace oracle {

// Parameters of the synthetic bundle generator. Per-epoch confidence in the
// observed label follows
//   floor + (ceiling - floor) * (1 - exp(-rate * e)) + U(-epoch_jitter, +epoch_jitter)
// for epochs e = 1..E, with rate drawn per sample from
//   base_rate * U(1 - rate_spread, 1 + rate_spread).
// Clean samples use floor = 1/C and clean_rate; planted-noise (mislabelled)
// samples use noisy_floor and the much slower noisy_rate.
struct SynthConfig {
  int64_t n_samples = 200;
  int64_t n_classes = 2;
  int64_t epochs = 5;
  int64_t seeds = 4;
  int64_t mc_passes = 4;
  int64_t clf_dim = 16;
  int64_t sent_dim = 16;
  double cluster_separation = 4.0;
  double planted_noise_fraction = 0.0;
  uint64_t rng_seed = 0;

  bool with_labels = true;
  bool with_mc = true;
  bool with_sent_embedding = true;
  bool with_tokens = true;

  double clean_rate = 1.5;
  double noisy_rate = 0.15;
  double rate_spread = 0.5;
  double confidence_ceiling = 0.97;
  double noisy_floor = 0.05;
  double epoch_jitter = 0.02;
  double seed_jitter = 0.05;
  double noisy_seed_jitter = 0.25;
  double mc_jitter = 0.03;

  // Throws InvalidArgument when a count is < 1 (C < 2) or the noise fraction
  // is outside [0, 0.5).
  void Validate() const;
};

RunBundle GenerateBundle(const SynthConfig& config);

// Planted-noise sample indices recorded in the bundle notes by GenerateBundle.
std::vector<int64_t> PlantedNoiseIndices(const RunBundle& bundle);

// Expected mean over a sample population of the noiseless ramp averaged over
// epochs 1..E, with the rate uniform on base_rate * [1 - spread, 1 + spread].
// The jitter is zero-mean and never clipped, so this is also the expected
// avg_confidence.
double ExpectedRampMean(double floor, double ceiling, double base_rate,
                        double spread, int64_t epochs);

// Naive transcription of every measure formula, sharing no numerical code with
// measures::ComputeAll: O(N^2) kNN with full sorts, BADGE through the explicit
// outer-product gradient, literal sums. Computes every measure whose inputs
// are present, in registry order.
MeasureMatrix ReferenceMeasures(const RunBundle& bundle, int knn_k = 5);

// K-th smallest distance from each row to the rows accepted by the
// candidate rule (same semantics as measures::Candidates), by full sort.
std::vector<double> ReferenceKnnDistance(const std::vector<std::vector<double>>& points,
                                         int k, measures::Candidates rule,
                                         const std::vector<int32_t>& groups);

}  // namespace oracle
}  // namespace infoverse

#endif  // INFOVERSE_ORACLE_H_
