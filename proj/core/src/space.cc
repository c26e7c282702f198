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

#include "infoverse/space.h"

#include <algorithm>
#include <cmath>

#include "infoverse/error.h"

namespace infoverse {

int64_t FeatureMatrix::ColumnIndex(std::string_view name) const {
  for (size_t i = 0; i < source_specs.size(); ++i) {
    if (source_specs[i].name == name) return static_cast<int64_t>(i);
  }
  return -1;
}

namespace space {
namespace {

void RequireRows(int64_t n) {
  if (n < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least 2 samples, got " + std::to_string(n));
  }
}

ColumnStats Stats(const Matrix& values, int64_t col) {
  const int64_t n = values.rows();
  double mean = 0.0;
  for (int64_t i = 0; i < n; ++i) mean += values(i, col);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double d = values(i, col) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(n))};
}

}  // namespace

FeatureMatrix Normalize(const Matrix& values, std::vector<MeasureSpec> specs) {
  RequireRows(values.rows());
  FeatureMatrix f;
  f.values.resize(values.rows(), values.cols());
  f.source_specs = std::move(specs);
  for (int64_t j = 0; j < values.cols(); ++j) {
    const ColumnStats s = Stats(values, j);
    f.norm_stats.push_back(s);
    const bool constant = !(s.std >= kConstantStdThreshold);
    f.constant_columns.push_back(constant);
    for (int64_t i = 0; i < values.rows(); ++i) {
      f.values(i, j) = constant ? 0.0 : (values(i, j) - s.mean) / s.std;
    }
  }
  return f;
}

FeatureMatrix Normalize(const MeasureMatrix& measures) {
  return Normalize(measures.values, measures.columns);
}

CorrelationMatrix Correlation(const Matrix& values,
                              std::vector<std::string> names) {
  RequireRows(values.rows());
  const int64_t n = values.rows();
  const int64_t f = values.cols();
  std::vector<ColumnStats> stats;
  for (int64_t j = 0; j < f; ++j) stats.push_back(Stats(values, j));

  CorrelationMatrix c;
  c.names = std::move(names);
  c.values = Matrix::Zero(f, f);
  for (int64_t a = 0; a < f; ++a) {
    c.constant_columns.push_back(!(stats[a].std >= kConstantStdThreshold));
  }
  for (int64_t a = 0; a < f; ++a) {
    if (c.constant_columns[a]) continue;
    c.values(a, a) = 1.0;
    for (int64_t b = a + 1; b < f; ++b) {
      if (c.constant_columns[b]) continue;
      double cov = 0.0;
      for (int64_t i = 0; i < n; ++i) {
        cov += (values(i, a) - stats[a].mean) * (values(i, b) - stats[b].mean);
      }
      cov /= static_cast<double>(n);
      const double r = cov / (stats[a].std * stats[b].std);
      c.values(a, b) = r;
      c.values(b, a) = r;
    }
  }
  return c;
}

CorrelationMatrix Correlation(const MeasureMatrix& measures) {
  std::vector<std::string> names;
  for (const auto& spec : measures.columns) names.push_back(spec.name);
  return Correlation(measures.values, std::move(names));
}

SymmetricEigen EigenDecompose(const Matrix& symmetric) {
  const Eigen::MatrixXd m = symmetric;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "eigendecomposition failed");
  }
  const int64_t f = m.rows();
  SymmetricEigen out{Vector(f), Matrix(f, f)};
  for (int64_t j = 0; j < f; ++j) {
    // Eigen returns ascending eigenvalues.
    const int64_t src = f - 1 - j;
    out.values[j] = solver.eigenvalues()[src];
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    int64_t pivot = 0;
    for (int64_t i = 1; i < f; ++i) {
      if (std::abs(v[i]) > std::abs(v[pivot])) pivot = i;
    }
    if (v[pivot] < 0) v = -v;
    out.vectors.col(j) = v;
  }
  return out;
}

std::vector<int64_t> PcaFeatureSelectColumns(const FeatureMatrix& features,
                                             int64_t keep) {
  const int64_t f = features.cols();
  if (keep < 1 || keep > f) {
    throw Error(ErrorCode::kInvalidArgument,
                "keep must be in [1, " + std::to_string(f) + "], got " +
                    std::to_string(keep));
  }
  const CorrelationMatrix corr = Correlation(features.values, {});
  const SymmetricEigen eig = EigenDecompose(corr.values);

  // Loadings that agree to this tolerance are ties, resolved to the lower
  // column index.
  constexpr double kTie = 1e-12;
  std::vector<bool> taken(static_cast<size_t>(f), false);
  std::vector<int64_t> chosen;
  for (int64_t comp = 0; comp < keep; ++comp) {
    int64_t best = -1;
    for (int64_t j = 0; j < f; ++j) {
      if (taken[j]) continue;
      if (best < 0 || std::abs(eig.vectors(j, comp)) >
                          std::abs(eig.vectors(best, comp)) + kTie) {
        best = j;
      }
    }
    taken[best] = true;
    chosen.push_back(best);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

FeatureMatrix SelectColumns(const FeatureMatrix& features,
                            const std::vector<int64_t>& columns) {
  FeatureMatrix out;
  out.values.resize(features.rows(), static_cast<int64_t>(columns.size()));
  for (size_t c = 0; c < columns.size(); ++c) {
    const int64_t j = columns[c];
    out.values.col(static_cast<int64_t>(c)) = features.values.col(j);
    if (!features.norm_stats.empty()) out.norm_stats.push_back(features.norm_stats[j]);
    if (!features.source_specs.empty()) {
      out.source_specs.push_back(features.source_specs[j]);
    }
    if (!features.constant_columns.empty()) {
      out.constant_columns.push_back(features.constant_columns[j]);
    }
  }
  return out;
}

FeatureMatrix PcaFeatureSelect(const FeatureMatrix& features, int64_t keep) {
  return SelectColumns(features, PcaFeatureSelectColumns(features, keep));
}

Matrix Project2d(const FeatureMatrix& features,
                 const std::optional<Matrix>& coords) {
  const int64_t n = features.rows();
  if (coords) {
    if (coords->rows() != n || coords->cols() != 2) {
      throw Error(ErrorCode::kCoordShapeMismatch,
                  "coordinates are " + std::to_string(coords->rows()) + "x" +
                      std::to_string(coords->cols()) + ", expected " +
                      std::to_string(n) + "x2");
    }
    return *coords;
  }
  const int64_t f = features.cols();
  Matrix centered = features.values;
  for (int64_t j = 0; j < f; ++j) {
    const double mean = centered.col(j).mean();
    centered.col(j).array() -= mean;
  }
  Matrix proj = Matrix::Zero(n, 2);
  if (n == 0 || f == 0) return proj;
  const Matrix cov = centered.transpose() * centered / static_cast<double>(n);
  const SymmetricEigen eig = EigenDecompose(cov);
  for (int64_t c = 0; c < std::min<int64_t>(2, f); ++c) {
    proj.col(c) = centered * eig.vectors.col(c);
  }
  return proj;
}

}  // namespace space
}  // namespace infoverse
