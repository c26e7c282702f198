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

#include "infoverse/select.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "infoverse/error.h"
#include "infoverse/measures.h"
#include "infoverse/rng.h"

namespace infoverse {

std::string_view ModeName(SelectionMode mode) {
  return mode == SelectionMode::kPrune ? "prune" : "acquire";
}

std::optional<SelectionMode> ParseMode(std::string_view name) {
  if (name == "prune") return SelectionMode::kPrune;
  if (name == "acquire") return SelectionMode::kAcquire;
  return std::nullopt;
}

namespace select {
namespace {

double SquaredDistance(const Matrix& points, int64_t i, const Vector& center) {
  double s = 0.0;
  for (int64_t d = 0; d < points.cols(); ++d) {
    const double diff = points(i, d) - center[d];
    s += diff * diff;
  }
  return s;
}

double SquaredDistance(const Matrix& a, int64_t i, const Matrix& b,
                       int64_t j) {
  double s = 0.0;
  for (int64_t d = 0; d < a.cols(); ++d) {
    const double diff = a(i, d) - b(j, d);
    s += diff * diff;
  }
  return s;
}

double SquaredDistance(const Matrix& points, int64_t i, int64_t j) {
  return SquaredDistance(points, i, points, j);
}

void CheckBudget(int64_t budget, int64_t n) {
  if (budget > n) {
    throw Error(ErrorCode::kBudgetExceedsN,
                "budget " + std::to_string(budget) + " exceeds N=" +
                    std::to_string(n));
  }
  if (budget < 1) throw Error(ErrorCode::kInvalidArgument, "budget must be >= 1");
}

}  // namespace

Vector DensityScore(const Matrix& points, std::span<const int32_t> labels,
                    SelectionMode mode, int k) {
  Vector d = measures::KnnDistance(points, k, measures::Candidates::kSameGroup,
                                   labels);
  for (int64_t i = 0; i < d.size(); ++i) {
    d[i] = std::max(d[i], kMinDensityDistance);
    if (mode == SelectionMode::kPrune) d[i] = 1.0 / d[i];
  }
  return d;
}

Vector DensityScore(const FeatureMatrix& features,
                    std::span<const int32_t> labels, SelectionMode mode,
                    int k) {
  return DensityScore(features.values, labels, mode, k);
}

std::string Method::Tag() const {
  switch (kind) {
    case MethodKind::kDpp: return "dpp";
    case MethodKind::kRandom: return "random";
    case MethodKind::kTopK: return "topk:" + measure;
    case MethodKind::kCoreset: return "coreset";
    case MethodKind::kKMeans: return "kmeans";
    case MethodKind::kDensity: return "density";
  }
  return "unknown";
}

Method ParseMethod(std::string_view text) {
  Method m;
  if (text == "dpp") {
    m.kind = MethodKind::kDpp;
  } else if (text == "random") {
    m.kind = MethodKind::kRandom;
  } else if (text == "coreset") {
    m.kind = MethodKind::kCoreset;
  } else if (text == "kmeans") {
    m.kind = MethodKind::kKMeans;
  } else if (text == "density") {
    m.kind = MethodKind::kDensity;
  } else if (text.starts_with("topk:") && text.size() > 5) {
    m.kind = MethodKind::kTopK;
    m.measure = std::string(text.substr(5));
  } else {
    throw Error(ErrorCode::kUnknownMethod, std::string(text));
  }
  return m;
}

int64_t BudgetFromRatio(double ratio, int64_t n) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "ratio must lie in (0, 1), got " + std::to_string(ratio));
  }
  // The small epsilon keeps ratios such as 0.17 * 100 from flooring to 16.
  const auto b = static_cast<int64_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  return std::max<int64_t>(b, 1);
}

std::vector<int64_t> RandomSelection(int64_t n, int64_t budget, uint64_t seed) {
  CheckBudget(budget, n);
  Rng rng(seed);
  return rng.SampleWithoutReplacement(n, budget);
}

std::vector<int64_t> TopKSelection(const Vector& scores, int64_t budget,
                                   bool ascending) {
  CheckBudget(budget, scores.size());
  std::vector<int64_t> order(static_cast<size_t>(scores.size()));
  std::iota(order.begin(), order.end(), int64_t{0});
  std::stable_sort(order.begin(), order.end(), [&](int64_t a, int64_t b) {
    return ascending ? scores[a] < scores[b] : scores[a] > scores[b];
  });
  order.resize(static_cast<size_t>(budget));
  return order;
}

std::vector<int64_t> CoresetSelection(const Matrix& points, int64_t budget) {
  const int64_t n = points.rows();
  CheckBudget(budget, n);
  const Vector centroid = points.colwise().mean().transpose();
  int64_t first = 0;
  double far = -1.0;
  for (int64_t i = 0; i < n; ++i) {
    const double d = SquaredDistance(points, i, centroid);
    if (d > far) {
      far = d;
      first = i;
    }
  }
  std::vector<int64_t> picks = {first};
  std::vector<double> nearest(static_cast<size_t>(n),
                              std::numeric_limits<double>::infinity());
  std::vector<bool> taken(static_cast<size_t>(n), false);
  taken[first] = true;
  int64_t last = first;
  while (static_cast<int64_t>(picks.size()) < budget) {
    int64_t next = -1;
    for (int64_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(points, i, last));
      if (taken[i]) continue;
      if (next < 0 || nearest[i] > nearest[next]) next = i;
    }
    taken[next] = true;
    picks.push_back(next);
    last = next;
  }
  return picks;
}

std::vector<int64_t> KMeansSelection(const Matrix& points, int64_t budget,
                                     uint64_t seed, int max_iterations) {
  const int64_t n = points.rows();
  const int64_t dims = points.cols();
  CheckBudget(budget, n);
  Rng rng(seed);

  // k-means++ seeding.
  Matrix centers(budget, dims);
  std::vector<double> d2(static_cast<size_t>(n),
                         std::numeric_limits<double>::infinity());
  int64_t pick = static_cast<int64_t>(rng.UniformInt(n));
  for (int64_t c = 0; c < budget; ++c) {
    centers.row(c) = points.row(pick);
    double total = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(points, i, pick));
      total += d2[i];
    }
    if (c + 1 == budget) break;
    if (total <= 0.0) {
      pick = static_cast<int64_t>(rng.UniformInt(n));
      continue;
    }
    const double target = rng.Uniform() * total;
    double acc = 0.0;
    pick = n - 1;
    for (int64_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc > target && d2[i] > 0.0) {
        pick = i;
        break;
      }
    }
  }

  std::vector<int64_t> assign(static_cast<size_t>(n), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (int64_t i = 0; i < n; ++i) {
      int64_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int64_t c = 0; c < budget; ++c) {
        const double d = SquaredDistance(points, i, centers, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(budget, dims);
    std::vector<int64_t> counts(static_cast<size_t>(budget), 0);
    for (int64_t i = 0; i < n; ++i) {
      sums.row(assign[i]) += points.row(i);
      ++counts[assign[i]];
    }
    for (int64_t c = 0; c < budget; ++c) {
      if (counts[c] > 0) centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
    }
  }

  // Nearest member to each centroid; clusters that are empty (or whose members
  // are all taken) fall back to the nearest unselected point.
  std::vector<bool> taken(static_cast<size_t>(n), false);
  std::vector<int64_t> picks;
  for (int64_t c = 0; c < budget; ++c) {
    const Vector center = centers.row(c).transpose();
    int64_t best = -1;
    int64_t fallback = -1;
    double best_d = std::numeric_limits<double>::infinity();
    double fallback_d = std::numeric_limits<double>::infinity();
    for (int64_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double d = SquaredDistance(points, i, center);
      if (assign[i] == c && d < best_d) {
        best_d = d;
        best = i;
      }
      if (d < fallback_d) {
        fallback_d = d;
        fallback = i;
      }
    }
    const int64_t chosen = best >= 0 ? best : fallback;
    taken[chosen] = true;
    picks.push_back(chosen);
  }
  return picks;
}

SelectionResult Select(const FeatureMatrix& features,
                       std::span<const int32_t> labels,
                       const SelectOptions& options) {
  const int64_t n = features.rows();
  CheckBudget(options.budget, n);
  if (!(options.beta > 0.0)) {
    throw Error(ErrorCode::kNonPositiveBeta,
                "beta must be positive, got " + std::to_string(options.beta));
  }
  const Matrix& baseline =
      options.baseline_space ? *options.baseline_space : features.values;
  if (baseline.rows() != n) {
    throw Error(ErrorCode::kShapeMismatch, "baseline space must have N rows");
  }

  SelectionResult result;
  std::vector<std::string> warnings;

  // The kernel every method is scored under. Baselines tolerate classes too
  // small for the density score and fall back to unit quality.
  std::optional<DppKernel> kernel;
  try {
    kernel = BuildKernel(
        features, DensityScore(features, labels, options.mode, options.knn_k),
        options.beta, options.dense_threshold);
  } catch (const Error& e) {
    if (options.method.kind == MethodKind::kDpp ||
        e.code() != ErrorCode::kTooFewCandidates) {
      throw;
    }
    warnings.push_back(std::string("log-det scored with unit quality: ") +
                       e.what());
    kernel = BuildKernel(features, Vector::Ones(n), options.beta,
                         options.dense_threshold);
  }

  std::vector<int64_t> picks;
  switch (options.method.kind) {
    case MethodKind::kDpp:
      result = GreedyMap(*kernel, options.budget);
      break;
    case MethodKind::kRandom:
      picks = RandomSelection(n, options.budget, options.seed);
      break;
    case MethodKind::kTopK: {
      const int64_t col = features.ColumnIndex(options.method.measure);
      if (col < 0) {
        throw Error(ErrorCode::kUnknownMeasure,
                    "no feature column named " + options.method.measure);
      }
      picks = TopKSelection(features.values.col(col), options.budget,
                            options.ascending);
      break;
    }
    case MethodKind::kCoreset:
      picks = CoresetSelection(baseline, options.budget);
      break;
    case MethodKind::kKMeans:
      picks = KMeansSelection(baseline, options.budget, options.seed,
                              options.kmeans_max_iterations);
      break;
    case MethodKind::kDensity:
      picks = TopKSelection(
          DensityScore(baseline, labels, options.mode, options.knn_k),
          options.budget, false);
      break;
  }
  if (options.method.kind != MethodKind::kDpp) {
    result.indices = std::move(picks);
    result.gains = MarginalGains(*kernel, result.indices);
    result.total_logdet = 0.0;
    for (double g : result.gains) result.total_logdet += g;
  }
  result.method = options.method.Tag();
  result.mode = options.mode;
  result.seed = options.seed;
  result.beta = options.beta;
  result.knn_k = options.knn_k;
  result.warnings.insert(result.warnings.end(), warnings.begin(),
                         warnings.end());
  return result;
}

}  // namespace select
}  // namespace infoverse
