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

#ifndef INFOVERSE_SPACE_H_
#define INFOVERSE_SPACE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infoverse/measures.h"
#include "infoverse/tensor.h"

namespace infoverse {

struct ColumnStats {
  double mean = 0.0;
  double std = 0.0;
};

// The normalized feature space: one z-scored row per sample.
struct FeatureMatrix {
  Matrix values;  // [N x F]
  std::vector<ColumnStats> norm_stats;
  std::vector<MeasureSpec> source_specs;
  std::vector<bool> constant_columns;

  int64_t rows() const { return values.rows(); }
  int64_t cols() const { return values.cols(); }
  int64_t ColumnIndex(std::string_view name) const;
};

struct CorrelationMatrix {
  Matrix values;  // [F x F]
  std::vector<std::string> names;
  // Columns with zero variance; their off-diagonal entries and diagonal are 0.
  std::vector<bool> constant_columns;
};

namespace space {

inline constexpr double kConstantStdThreshold = 1e-12;

// Per-column z-score with the population standard deviation. Columns whose
// std falls below kConstantStdThreshold become zero and are flagged.
FeatureMatrix Normalize(const Matrix& values, std::vector<MeasureSpec> specs);
FeatureMatrix Normalize(const MeasureMatrix& measures);

CorrelationMatrix Correlation(const Matrix& values,
                              std::vector<std::string> names);
CorrelationMatrix Correlation(const MeasureMatrix& measures);

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // column j pairs with values[j]
};
// Deterministic eigendecomposition of a symmetric matrix; each eigenvector's
// largest-magnitude entry is made positive.
SymmetricEigen EigenDecompose(const Matrix& symmetric);

// Column indices (ascending) kept by greedy max-|loading| selection over the
// leading `keep` principal components of the correlation matrix.
std::vector<int64_t> PcaFeatureSelectColumns(const FeatureMatrix& features,
                                             int64_t keep);
FeatureMatrix PcaFeatureSelect(const FeatureMatrix& features, int64_t keep);

FeatureMatrix SelectColumns(const FeatureMatrix& features,
                            const std::vector<int64_t>& columns);

// External coordinates verbatim when supplied, otherwise the first two
// principal-component scores.
Matrix Project2d(const FeatureMatrix& features,
                 const std::optional<Matrix>& coords = std::nullopt);

}  // namespace space
}  // namespace infoverse

#endif  // INFOVERSE_SPACE_H_
