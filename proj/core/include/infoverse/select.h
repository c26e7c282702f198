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

#ifndef INFOVERSE_SELECT_H_
#define INFOVERSE_SELECT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "infoverse/space.h"
#include "infoverse/tensor.h"

namespace infoverse {

// Prune favours dense, representative samples (q = 1/d); Acquire favours
// sparse, novel ones (q = d).
enum class SelectionMode { kPrune, kAcquire };

std::string_view ModeName(SelectionMode mode);
std::optional<SelectionMode> ParseMode(std::string_view name);

inline constexpr double kDefaultBeta = 0.5;
inline constexpr int64_t kDefaultDenseThreshold = 4096;
inline constexpr double kMinDensityDistance = 1e-9;

// L_ij = q_i * S_ij * q_j. When built from features the similarity is the
// Gaussian kernel exp(-beta * ||x_i - x_j||^2), evaluated on demand unless N
// is at most the dense threshold, in which case S is materialized up front.
class DppKernel {
 public:
  static DppKernel FromFeatures(const Matrix& features, const Vector& quality,
                                double beta,
                                int64_t dense_threshold = kDefaultDenseThreshold);
  static DppKernel FromSimilarity(const Matrix& similarity,
                                  const Vector& quality);
  // An explicit PSD kernel; quality() reports sqrt(diag(L)).
  static DppKernel FromMatrix(const Matrix& kernel);

  int64_t size() const { return quality_.size(); }
  double beta() const { return beta_; }
  const Vector& quality() const { return quality_; }
  bool materialized() const { return dense_similarity_.size() > 0 || explicit_; }

  double Similarity(int64_t i, int64_t j) const;
  double Entry(int64_t i, int64_t j) const;
  // Row i of L.
  void Row(int64_t i, std::span<double> out) const;
  Vector Diagonal() const;
  // L restricted to `indices` (in the given order).
  Matrix Submatrix(std::span<const int64_t> indices) const;
  // Full L; intended for small kernels and tests.
  Matrix Dense() const;

 private:
  DppKernel() = default;

  Matrix features_;
  Matrix dense_similarity_;
  Vector quality_;
  double beta_ = 0.0;
  bool explicit_ = false;  // dense_similarity_ holds L itself
};

struct SelectionResult {
  std::vector<int64_t> indices;
  std::vector<double> gains;  // marginal log-det gain per pick, in pick order
  double total_logdet = 0.0;
  std::string method;
  SelectionMode mode = SelectionMode::kPrune;
  uint64_t seed = 0;
  double beta = kDefaultBeta;
  int knn_k = 5;
  bool rank_deficient = false;
  std::vector<std::string> warnings;
};

namespace select {

// Class-conditional K-th neighbour distance d_i in feature space, clamped to
// kMinDensityDistance, returned as 1/d (Prune) or d (Acquire).
Vector DensityScore(const Matrix& points, std::span<const int32_t> labels,
                    SelectionMode mode, int k);
Vector DensityScore(const FeatureMatrix& features,
                    std::span<const int32_t> labels, SelectionMode mode, int k);

DppKernel BuildKernel(const FeatureMatrix& features, const Vector& quality,
                      double beta,
                      int64_t dense_threshold = kDefaultDenseThreshold);

// Fast greedy MAP with incremental Cholesky updates: O(N k^2) time, O(N k)
// extra space. Ties go to the lowest index.
SelectionResult GreedyMap(const DppKernel& kernel, int64_t k);

// Exact MAP by enumerating every k-subset. Refuses more than 10^6 subsets.
SelectionResult ExhaustiveMap(const DppKernel& kernel, int64_t k);
inline constexpr int64_t kMaxExhaustiveSubsets = 1000000;

// Per-pick log-det gains of `indices` under `kernel`, via incremental
// Cholesky. Numerically singular picks contribute log(DBL_MIN).
std::vector<double> MarginalGains(const DppKernel& kernel,
                                  std::span<const int64_t> indices);

// Log-determinant by Gaussian elimination with partial pivoting; -inf for a
// singular matrix.
double LogDeterminant(const Matrix& m);

enum class MethodKind { kDpp, kRandom, kTopK, kCoreset, kKMeans, kDensity };

struct Method {
  MethodKind kind = MethodKind::kDpp;
  std::string measure;  // topk only

  std::string Tag() const;
};

// Parses dpp | random | topk:<measure> | coreset | kmeans | density. Throws
// UnknownMethod; the measure name of topk is checked later against the
// feature columns.
Method ParseMethod(std::string_view text);

struct SelectOptions {
  SelectionMode mode = SelectionMode::kPrune;
  int64_t budget = 1;
  Method method;
  uint64_t seed = 0;
  double beta = kDefaultBeta;
  int knn_k = 5;
  // topk direction; false picks the largest values.
  bool ascending = false;
  // Alternative space (e.g. classifier embeddings) for coreset, kmeans and
  // density. Null means the normalized feature space.
  const Matrix* baseline_space = nullptr;
  int64_t dense_threshold = kDefaultDenseThreshold;
  int kmeans_max_iterations = 50;
};

// Runs one selection method. Every method reports gains under the DPP kernel
// of the requested mode so that log-determinants are comparable.
SelectionResult Select(const FeatureMatrix& features,
                       std::span<const int32_t> labels,
                       const SelectOptions& options);

// floor(ratio * n), at least 1.
int64_t BudgetFromRatio(double ratio, int64_t n);

// Individual baselines, exposed for testing.
std::vector<int64_t> RandomSelection(int64_t n, int64_t budget, uint64_t seed);
std::vector<int64_t> TopKSelection(const Vector& scores, int64_t budget,
                                   bool ascending);
std::vector<int64_t> CoresetSelection(const Matrix& points, int64_t budget);
std::vector<int64_t> KMeansSelection(const Matrix& points, int64_t budget,
                                     uint64_t seed, int max_iterations);

}  // namespace select
}  // namespace infoverse

#endif  // INFOVERSE_SELECT_H_
