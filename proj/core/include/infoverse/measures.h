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

#ifndef INFOVERSE_MEASURES_H_
#define INFOVERSE_MEASURES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infoverse/bundle.h"
#include "infoverse/tensor.h"

namespace infoverse {

enum class MeasureCategory {
  kStatic,
  kTrainingDynamics,
  kModelUncertaintyEnsemble,
  kModelUncertaintyMC,
  kPretrainedKnowledge,
};

enum class BundleField {
  kStaticProbs,
  kEpochLogprobs,
  kSeedLogprobs,
  kMcLogprobs,
  kClfEmbedding,
  kSentEmbedding,
  kTokenLogprobs,
};

std::string_view BundleFieldName(BundleField field);
std::string_view CategoryName(MeasureCategory category);

struct MeasureSpec {
  std::string name;
  MeasureCategory category;
  std::vector<BundleField> required_inputs;

  friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

// The 23 measures in canonical column order.
const std::vector<MeasureSpec>& MeasureRegistry();
// Index into MeasureRegistry(), or -1.
int RegistryIndex(std::string_view name);

struct MeasureMatrix {
  Matrix values;  // [N x F]
  std::vector<MeasureSpec> columns;
  LabelSource label_source = LabelSource::kGold;
  std::vector<int32_t> labels;
  // Fraction of training epochs in which each sample was classified correctly;
  // carried along for data-map reports.
  Vector epoch_correctness;
  // Measures dropped because an optional bundle input was absent.
  std::vector<std::string> skipped;

  int64_t rows() const { return values.rows(); }
  int64_t cols() const { return values.cols(); }
  // Column position of `name`, or -1.
  int64_t ColumnIndex(std::string_view name) const;
};

namespace measures {

inline constexpr int kDefaultKnn = 5;
inline constexpr double kProbFloor = 1e-12;

// Which samples are eligible neighbours of a query.
enum class Candidates {
  kAll,         // every other sample
  kSameGroup,   // other samples with the query's group id
  kOtherGroup,  // samples with a different group id
};

// Distance from each point to its K-th nearest eligible neighbour (never
// itself). `groups` is only read for the group-restricted rules. Throws
// TooFewCandidates naming the first query with fewer than K candidates.
Vector KnnDistance(const Matrix& points, int k,
                   Candidates rule = Candidates::kAll,
                   std::span<const int32_t> groups = {});

// Shannon entropy (natural log) of one probability row, 0*ln0 := 0.
double Entropy(std::span<const double> probs);
double RowEntropy(const Matrix& probs, int64_t row);
// Argmax with ties going to the lowest index.
int32_t ArgMax(const Matrix& probs, int64_t row);

struct StaticScores {
  Vector confidence;
  Vector entropy;
};
StaticScores StaticConfidenceEntropy(const Matrix& probs,
                                     std::span<const int32_t> labels);

// ||p - onehot(y)|| * ||z||, the Frobenius norm of the last-layer gradient.
Vector BadgeScore(const Matrix& probs, std::span<const int32_t> labels,
                  const Matrix& clf_embedding);

struct Densities {
  Vector task_density;
  Vector relative_density;
  Vector semantic_density;
};
// Negated K-th neighbour distances. `sent_embedding` may be null, in which case
// semantic_density is left empty.
Densities ComputeDensities(const Matrix& clf_embedding,
                           const Matrix* sent_embedding,
                           std::span<const int32_t> labels, int k);

struct TrainingDynamics {
  Vector avg_confidence;
  Vector variability;
  Vector forgetting;
  Vector aum;
  Vector correctness;  // fraction of epochs with argmax == label
};
// `epoch_logprobs` holds one [N x C] log-probability matrix per epoch.
TrainingDynamics ComputeTrainingDynamics(
    const std::vector<Matrix>& epoch_logprobs, std::span<const int32_t> labels);

struct EnsembleUncertainty {
  Vector el2n;
  Vector entropy;
  Vector bald;
  Vector variation_ratio;
  Vector confidence;
  Vector variability;
};
// `member_logprobs` holds one [N x C] log-probability matrix per ensemble
// member (seeded model or MC-dropout pass).
EnsembleUncertainty ComputeEnsembleUncertainty(
    const std::vector<Matrix>& member_logprobs,
    std::span<const int32_t> labels);

// Summed token log-probabilities; `per_token_mean` divides by the length.
Vector PseudoLogLikelihood(const TokenLogprobs& tokens,
                           bool per_token_mean = false);

struct ComputeOptions {
  // Measure names to compute; nullopt selects every measure whose inputs the
  // bundle provides and reports the rest in MeasureMatrix::skipped.
  std::optional<std::vector<std::string>> selected;
  int knn_k = kDefaultKnn;
  bool pll_per_token_mean = false;
};

MeasureMatrix ComputeAll(const RunBundle& bundle,
                         const ComputeOptions& options = {});

}  // namespace measures
}  // namespace infoverse

#endif  // INFOVERSE_MEASURES_H_
