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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "infoverse/error.h"
#include "infoverse/rng.h"
#include "test_util.h"

namespace infoverse {
namespace {

using testing::Rows;

std::vector<MeasureSpec> Specs(int64_t f) {
  std::vector<MeasureSpec> specs;
  for (int64_t j = 0; j < f; ++j) specs.push_back(MeasureRegistry()[j]);
  return specs;
}

Matrix RandomMatrix(int64_t n, int64_t f, uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, f);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < f; ++j) m(i, j) = rng.Normal();
  }
  return m;
}

TEST(NormalizeTest, PopulationZScore) {
  const FeatureMatrix f = space::Normalize(Rows({{1.0}, {2.0}, {3.0}}), Specs(1));
  EXPECT_NEAR(f.values(0, 0), -1.224745, 1e-6);
  EXPECT_NEAR(f.values(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(f.values(2, 0), 1.224745, 1e-6);
  EXPECT_NEAR(f.norm_stats[0].mean, 2.0, 1e-12);
  EXPECT_NEAR(f.norm_stats[0].std, std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_FALSE(f.constant_columns[0]);
}

TEST(NormalizeTest, ConstantColumnIsZeroedAndFlagged) {
  const FeatureMatrix f =
      space::Normalize(Rows({{5.0, 1.0}, {5.0, 2.0}, {5.0, 4.0}}), Specs(2));
  EXPECT_TRUE(f.constant_columns[0]);
  EXPECT_FALSE(f.constant_columns[1]);
  EXPECT_TRUE(f.values.col(0).isZero(0.0));
}

TEST(NormalizeTest, Idempotent) {
  const Matrix raw = RandomMatrix(50, 4, 3) * 7.0;
  const FeatureMatrix once = space::Normalize(raw, Specs(4));
  const FeatureMatrix twice = space::Normalize(once.values, Specs(4));
  EXPECT_LE((once.values - twice.values).cwiseAbs().maxCoeff(), 1e-9);
  for (int64_t j = 0; j < 4; ++j) {
    EXPECT_NEAR(once.values.col(j).mean(), 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(once.values.col(j).squaredNorm() / 50.0), 1.0, 1e-9);
  }
}

TEST(CorrelationTest, SelfAndNegation) {
  const Matrix base = RandomMatrix(30, 1, 5);
  Matrix m(30, 2);
  m.col(0) = base.col(0);
  m.col(1) = -base.col(0);
  const CorrelationMatrix c = space::Correlation(m, {"a", "b"});
  EXPECT_EQ(c.values(0, 0), 1.0);
  EXPECT_NEAR(c.values(0, 1), -1.0, 1e-12);
  EXPECT_EQ(c.values(0, 1), c.values(1, 0));
}

TEST(CorrelationTest, IndependentColumnsNearZero) {
  const CorrelationMatrix c =
      space::Correlation(RandomMatrix(10000, 3, 42), {"a", "b", "c"});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i != j) EXPECT_LT(std::abs(c.values(i, j)), 0.05);
    }
  }
}

TEST(CorrelationTest, ConstantColumnHasZeroRowAndColumn) {
  const CorrelationMatrix c =
      space::Correlation(Rows({{1.0, 3.0}, {2.0, 3.0}, {4.0, 3.0}}), {"a", "b"});
  EXPECT_TRUE(c.constant_columns[1]);
  EXPECT_EQ(c.values(1, 1), 0.0);
  EXPECT_EQ(c.values(0, 1), 0.0);
  EXPECT_EQ(c.values(0, 0), 1.0);
}

TEST(CorrelationTest, AffineInvariant) {
  const Matrix m = RandomMatrix(200, 3, 9);
  Matrix t = m;
  t.col(0) = t.col(0) * 3.5 + Vector::Constant(200, -4.0);
  t.col(1) = t.col(1) * 0.01 + Vector::Constant(200, 100.0);
  t.col(2) = t.col(2) * 12.0;
  const auto a = space::Correlation(m, {"a", "b", "c"});
  const auto b = space::Correlation(t, {"a", "b", "c"});
  EXPECT_LE((a.values - b.values).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(EigenTest, DescendingWithSignConvention) {
  const Matrix s = Rows({{2.0, 1.0}, {1.0, 2.0}});
  const auto e = space::EigenDecompose(s);
  EXPECT_NEAR(e.values[0], 3.0, 1e-12);
  EXPECT_NEAR(e.values[1], 1.0, 1e-12);
  for (int c = 0; c < 2; ++c) {
    const auto v = e.vectors.col(c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(v[arg], 0.0);
  }
}

FeatureMatrix DuplicatePlusIndependent() {
  const Matrix base = RandomMatrix(500, 2, 17);
  Matrix m(500, 3);
  m.col(0) = base.col(0);
  m.col(1) = base.col(0);
  m.col(2) = base.col(1);
  return space::Normalize(m, Specs(3));
}

TEST(PcaSelectTest, KeepsOneDuplicateAndTheIndependentColumn) {
  const auto cols = space::PcaFeatureSelectColumns(DuplicatePlusIndependent(), 2);
  ASSERT_EQ(cols.size(), 2u);
  EXPECT_TRUE(cols[0] == 0 || cols[0] == 1);
  EXPECT_EQ(cols[1], 2);
}

// Dominant eigenvector by plain power iteration, independent of the solver
// under test.
Vector PowerIteration(const Matrix& a) {
  Vector v = Vector::Ones(a.rows());
  for (int it = 0; it < 5000; ++it) {
    Vector next = a * v;
    next /= next.norm();
    if ((next - v).norm() < 1e-14) return next;
    v = next;
  }
  return v;
}

TEST(PcaSelectTest, KeepOneMatchesLargestLoading) {
  Matrix raw = RandomMatrix(300, 5, 23);
  raw.col(1) += 0.9 * raw.col(0);
  raw.col(3) += 1.5 * raw.col(0) + 0.4 * raw.col(1);
  const FeatureMatrix f = space::Normalize(raw, Specs(5));
  const CorrelationMatrix c = space::Correlation(f.values, {});
  const Vector v = PowerIteration(c.values);
  Eigen::Index expected = 0;
  v.cwiseAbs().maxCoeff(&expected);
  const auto cols = space::PcaFeatureSelectColumns(f, 1);
  ASSERT_EQ(cols.size(), 1u);
  EXPECT_EQ(cols[0], expected);
}

TEST(PcaSelectTest, KeepAllIsAPermutation) {
  const FeatureMatrix f = space::Normalize(RandomMatrix(100, 6, 2), Specs(6));
  const FeatureMatrix kept = space::PcaFeatureSelect(f, 6);
  ASSERT_EQ(kept.cols(), 6);
  std::vector<bool> seen(6, false);
  for (int64_t c = 0; c < 6; ++c) {
    for (int64_t j = 0; j < 6; ++j) {
      if (!seen[j] && kept.values.col(c) == f.values.col(j)) {
        seen[j] = true;
        break;
      }
    }
  }
  for (bool s : seen) EXPECT_TRUE(s);
}

TEST(PcaSelectTest, OutputIsSubsetOfInput) {
  const FeatureMatrix f = space::Normalize(RandomMatrix(80, 7, 8), Specs(7));
  const FeatureMatrix kept = space::PcaFeatureSelect(f, 3);
  const auto cols = space::PcaFeatureSelectColumns(f, 3);
  for (int64_t c = 0; c < 3; ++c) {
    EXPECT_EQ(kept.values.col(c), f.values.col(cols[c]));
    EXPECT_EQ(kept.source_specs[c], f.source_specs[cols[c]]);
  }
}

TEST(PcaSelectTest, RejectsBadKeep) {
  const FeatureMatrix f = space::Normalize(RandomMatrix(10, 3, 1), Specs(3));
  EXPECT_THROW(space::PcaFeatureSelectColumns(f, 0), Error);
  EXPECT_THROW(space::PcaFeatureSelectColumns(f, 4), Error);
}

TEST(Project2dTest, ExternalCoordinatesPassThrough) {
  const FeatureMatrix f = space::Normalize(RandomMatrix(4, 3, 1), Specs(3));
  const Matrix coords = Rows({{1, 2}, {3, 4}, {5, 6}, {7, 8}});
  EXPECT_EQ(space::Project2d(f, coords), coords);
}

TEST(Project2dTest, WrongShapeIsRejected) {
  const FeatureMatrix f = space::Normalize(RandomMatrix(4, 3, 1), Specs(3));
  try {
    space::Project2d(f, Rows({{1, 2}, {3, 4}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoordShapeMismatch);
  }
}

TEST(Project2dTest, RankTwoDataKeepsPairwiseDistances) {
  const Matrix basis = RandomMatrix(2, 5, 31);
  const Matrix latent = RandomMatrix(40, 2, 32);
  FeatureMatrix f;
  f.values = latent * basis;
  const Matrix p = space::Project2d(f);
  for (int64_t i = 0; i < 40; ++i) {
    for (int64_t j = i + 1; j < 40; ++j) {
      const double d_full = (f.values.row(i) - f.values.row(j)).norm();
      const double d_proj = (p.row(i) - p.row(j)).norm();
      EXPECT_NEAR(d_full, d_proj, 1e-6);
    }
  }
}

}  // namespace
}  // namespace infoverse
