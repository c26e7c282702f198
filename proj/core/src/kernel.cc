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
#include <cfloat>
#include <cmath>
#include <limits>

#include "infoverse/error.h"
#include "infoverse/select.h"

namespace infoverse {
namespace {

void CheckQuality(const Vector& q) {
  for (int64_t i = 0; i < q.size(); ++i) {
    if (!(q[i] > 0.0) || !std::isfinite(q[i])) {
      throw Error(ErrorCode::kNonPositiveScore,
                  "score of sample " + std::to_string(i) + " is " +
                      std::to_string(q[i]),
                  i);
    }
  }
}

// Items whose residual variance falls below this fraction of the largest
// diagonal entry are treated as lying in the span of the current selection.
constexpr double kRankTolerance = 1e-10;

double SafeLog(double x) { return std::log(std::max(x, DBL_MIN)); }

}  // namespace

DppKernel DppKernel::FromFeatures(const Matrix& features, const Vector& quality,
                                  double beta, int64_t dense_threshold) {
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::kNonPositiveBeta,
                "beta must be positive, got " + std::to_string(beta));
  }
  if (quality.size() != features.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "score vector length != N");
  }
  CheckQuality(quality);
  DppKernel k;
  k.features_ = features;
  k.quality_ = quality;
  k.beta_ = beta;
  const int64_t n = features.rows();
  if (n <= dense_threshold) {
    k.dense_similarity_.resize(n, n);
    for (int64_t i = 0; i < n; ++i) {
      k.dense_similarity_(i, i) = 1.0;
      for (int64_t j = i + 1; j < n; ++j) {
        const double s = std::exp(-beta * (features.row(i) - features.row(j)).squaredNorm());
        k.dense_similarity_(i, j) = s;
        k.dense_similarity_(j, i) = s;
      }
    }
  }
  return k;
}

DppKernel DppKernel::FromSimilarity(const Matrix& similarity,
                                    const Vector& quality) {
  if (similarity.rows() != similarity.cols() ||
      similarity.rows() != quality.size()) {
    throw Error(ErrorCode::kShapeMismatch, "similarity must be N x N");
  }
  CheckQuality(quality);
  DppKernel k;
  k.dense_similarity_ = similarity;
  k.quality_ = quality;
  return k;
}

DppKernel DppKernel::FromMatrix(const Matrix& kernel) {
  if (kernel.rows() != kernel.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "kernel must be square");
  }
  DppKernel k;
  k.dense_similarity_ = kernel;
  k.explicit_ = true;
  k.quality_ = kernel.diagonal().cwiseMax(0.0).cwiseSqrt();
  return k;
}

double DppKernel::Similarity(int64_t i, int64_t j) const {
  if (explicit_) {
    const double denom = quality_[i] * quality_[j];
    return denom > 0.0 ? dense_similarity_(i, j) / denom : 0.0;
  }
  if (dense_similarity_.size() > 0) return dense_similarity_(i, j);
  if (i == j) return 1.0;
  return std::exp(-beta_ * (features_.row(i) - features_.row(j)).squaredNorm());
}

double DppKernel::Entry(int64_t i, int64_t j) const {
  if (explicit_) return dense_similarity_(i, j);
  return quality_[i] * quality_[j] * Similarity(i, j);
}

void DppKernel::Row(int64_t i, std::span<double> out) const {
  const int64_t n = size();
  if (explicit_) {
    for (int64_t j = 0; j < n; ++j) out[j] = dense_similarity_(i, j);
    return;
  }
  for (int64_t j = 0; j < n; ++j) out[j] = quality_[i] * quality_[j] * Similarity(i, j);
}

Vector DppKernel::Diagonal() const {
  if (explicit_) return dense_similarity_.diagonal();
  return quality_.array().square();
}

Matrix DppKernel::Submatrix(std::span<const int64_t> indices) const {
  const int64_t m = static_cast<int64_t>(indices.size());
  Matrix sub(m, m);
  for (int64_t a = 0; a < m; ++a) {
    for (int64_t b = 0; b < m; ++b) sub(a, b) = Entry(indices[a], indices[b]);
  }
  return sub;
}

Matrix DppKernel::Dense() const {
  const int64_t n = size();
  Matrix l(n, n);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < n; ++j) l(i, j) = Entry(i, j);
  }
  return l;
}

namespace select {

DppKernel BuildKernel(const FeatureMatrix& features, const Vector& quality,
                      double beta, int64_t dense_threshold) {
  return DppKernel::FromFeatures(features.values, quality, beta,
                                 dense_threshold);
}

SelectionResult GreedyMap(const DppKernel& kernel, int64_t k) {
  const int64_t n = kernel.size();
  if (k > n) {
    throw Error(ErrorCode::kBudgetExceedsN,
                "budget " + std::to_string(k) + " exceeds N=" + std::to_string(n));
  }
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "budget must be >= 1");

  SelectionResult result;
  result.method = "dpp";
  result.beta = kernel.beta();

  Vector residual = kernel.Diagonal();  // d_i^2
  const double floor = kRankTolerance * std::max(residual.maxCoeff(), 0.0);
  // Row i holds the Cholesky coordinates of item i against the picks so far.
  Matrix coords = Matrix::Zero(n, k);
  std::vector<bool> chosen(static_cast<size_t>(n), false);
  std::vector<double> row(static_cast<size_t>(n));

  for (int64_t it = 0; it < k; ++it) {
    int64_t best = -1;
    for (int64_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      if (best < 0 || residual[i] > residual[best]) best = i;
    }
    if (!(residual[best] > floor)) {
      result.rank_deficient = true;
      break;
    }
    chosen[best] = true;
    result.indices.push_back(best);
    result.gains.push_back(std::log(residual[best]));
    if (it + 1 == k) break;

    kernel.Row(best, row);
    const double pivot = std::sqrt(residual[best]);
    const auto best_coords = coords.row(best).head(it);
    for (int64_t i = 0; i < n; ++i) {
      if (chosen[i]) continue;
      const double e =
          (row[i] - best_coords.dot(coords.row(i).head(it))) / pivot;
      coords(i, it) = e;
      residual[i] -= e * e;
    }
  }

  if (result.rank_deficient) {
    result.warnings.push_back(
        "RankDeficient: kernel rank exhausted after " +
        std::to_string(result.indices.size()) +
        " picks; remaining slots filled by descending score");
    std::vector<int64_t> rest;
    for (int64_t i = 0; i < n; ++i) {
      if (!chosen[i]) rest.push_back(i);
    }
    const Vector& q = kernel.quality();
    std::stable_sort(rest.begin(), rest.end(),
                     [&](int64_t a, int64_t b) { return q[a] > q[b]; });
    for (int64_t i : rest) {
      if (static_cast<int64_t>(result.indices.size()) == k) break;
      result.indices.push_back(i);
      result.gains.push_back(SafeLog(residual[i]));
    }
  }
  for (double g : result.gains) result.total_logdet += g;
  return result;
}

double LogDeterminant(const Matrix& m) {
  const int64_t n = m.rows();
  Matrix a = m;
  double sign = 1.0;
  double logdet = 0.0;
  for (int64_t col = 0; col < n; ++col) {
    int64_t pivot = col;
    for (int64_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (a(pivot, col) == 0.0) return -std::numeric_limits<double>::infinity();
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      sign = -sign;
    }
    for (int64_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      for (int64_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
    }
    if (a(col, col) < 0.0) sign = -sign;
    logdet += std::log(std::abs(a(col, col)));
  }
  // Negative determinants cannot come from a PSD kernel.
  return sign > 0.0 ? logdet : -std::numeric_limits<double>::infinity();
}

std::vector<double> MarginalGains(const DppKernel& kernel,
                                  std::span<const int64_t> indices) {
  const int64_t m = static_cast<int64_t>(indices.size());
  Matrix chol = Matrix::Zero(m, m);
  std::vector<double> gains;
  gains.reserve(indices.size());
  for (int64_t a = 0; a < m; ++a) {
    for (int64_t b = 0; b < a; ++b) {
      double v = kernel.Entry(indices[a], indices[b]);
      v -= chol.row(a).head(b).dot(chol.row(b).head(b));
      chol(a, b) = chol(b, b) > 0.0 ? v / chol(b, b) : 0.0;
    }
    const double d2 =
        kernel.Entry(indices[a], indices[a]) - chol.row(a).head(a).squaredNorm();
    gains.push_back(SafeLog(d2));
    chol(a, a) = d2 > DBL_MIN ? std::sqrt(d2) : 0.0;
  }
  return gains;
}

SelectionResult ExhaustiveMap(const DppKernel& kernel, int64_t k) {
  const int64_t n = kernel.size();
  if (k > n) {
    throw Error(ErrorCode::kBudgetExceedsN,
                "budget " + std::to_string(k) + " exceeds N=" + std::to_string(n));
  }
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "budget must be >= 0");
  // C(n, k) with early exit once the cap is passed.
  double subsets = 1.0;
  for (int64_t i = 0; i < std::min(k, n - k); ++i) {
    subsets = subsets * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  if (subsets > static_cast<double>(kMaxExhaustiveSubsets)) {
    throw Error(ErrorCode::kCombinatorialBlowup,
                "C(" + std::to_string(n) + "," + std::to_string(k) +
                    ") exceeds " + std::to_string(kMaxExhaustiveSubsets));
  }

  SelectionResult result;
  result.method = "exhaustive";
  result.beta = kernel.beta();
  if (k == 0) return result;

  const Matrix l = kernel.Dense();
  std::vector<int64_t> subset(static_cast<size_t>(k));
  for (int64_t i = 0; i < k; ++i) subset[i] = i;
  std::vector<int64_t> best;
  double best_logdet = -std::numeric_limits<double>::infinity();
  Matrix sub(k, k);
  while (true) {
    for (int64_t a = 0; a < k; ++a) {
      for (int64_t b = 0; b < k; ++b) sub(a, b) = l(subset[a], subset[b]);
    }
    const double ld = LogDeterminant(sub);
    if (best.empty() || ld > best_logdet) {
      best_logdet = ld;
      best = subset;
    }
    // Next combination in lexicographic order.
    int64_t pos = k - 1;
    while (pos >= 0 && subset[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++subset[pos];
    for (int64_t j = pos + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
  }
  result.indices = best;
  result.gains = MarginalGains(kernel, best);
  for (double g : result.gains) result.total_logdet += g;
  return result;
}

}  // namespace select
}  // namespace infoverse
