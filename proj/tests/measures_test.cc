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

#include "infoverse/measures.h"

#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "infoverse/error.h"
#include "infoverse/oracle.h"
#include "test_util.h"

namespace infoverse {
namespace {

using testing::Log;
using testing::Rows;

constexpr double kTol = 1e-6;

std::vector<double> Knn(const Matrix& pts, int k,
                        measures::Candidates rule = measures::Candidates::kAll,
                        std::vector<int32_t> groups = {}) {
  const Vector d = measures::KnnDistance(pts, k, rule, groups);
  return {d.data(), d.data() + d.size()};
}

TEST(KnnDistanceTest, SymmetricPair) {
  EXPECT_EQ(Knn(Rows({{0.0}, {2.0}}), 1), (std::vector<double>{2.0, 2.0}));
}

TEST(KnnDistanceTest, CollinearPoints) {
  EXPECT_EQ(Knn(Rows({{0.0}, {1.0}, {3.0}}), 1),
            (std::vector<double>{1.0, 1.0, 2.0}));
}

TEST(KnnDistanceTest, TooFewCandidates) {
  try {
    measures::KnnDistance(Rows({{0.0}, {1.0}, {3.0}}), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewCandidates);
  }
}

TEST(KnnDistanceTest, GroupRestrictedCandidates) {
  const Matrix pts = Rows({{0.0}, {1.0}, {5.0}, {7.0}});
  const std::vector<int32_t> g{0, 1, 0, 1};
  EXPECT_EQ(Knn(pts, 1, measures::Candidates::kSameGroup, g),
            (std::vector<double>{5.0, 6.0, 5.0, 6.0}));
  EXPECT_EQ(Knn(pts, 1, measures::Candidates::kOtherGroup, g),
            (std::vector<double>{1.0, 1.0, 2.0, 2.0}));
}

TEST(StaticScoresTest, TabulatedValues) {
  const Matrix p = Rows({{1.0, 0.0}, {0.5, 0.5}, {0.9, 0.1}});
  const std::vector<int32_t> y{0, 0, 1};
  const auto s = measures::StaticConfidenceEntropy(p, y);
  EXPECT_NEAR(s.confidence[0], 1.0, kTol);
  EXPECT_NEAR(s.entropy[0], 0.0, kTol);
  EXPECT_NEAR(s.confidence[1], 0.5, kTol);
  EXPECT_NEAR(s.entropy[1], 0.693147, kTol);
  EXPECT_NEAR(s.confidence[2], 0.1, kTol);
  EXPECT_NEAR(s.entropy[2], 0.325083, kTol);
}

TEST(BadgeTest, TabulatedValues) {
  const Matrix p = Rows({{1.0, 0.0}, {0.6, 0.4}, {0.6, 0.4}});
  const Matrix z = Rows({{3.0, 4.0}, {0.6, 0.8}, {0.0, 0.0}});
  const Vector b = measures::BadgeScore(p, std::vector<int32_t>{0, 0, 0}, z);
  EXPECT_NEAR(b[0], 0.0, 1e-12);
  EXPECT_NEAR(b[1], 0.565685, kTol);
  EXPECT_EQ(b[2], 0.0);
}

TEST(DensitiesTest, PairAndSymmetry) {
  const auto pair = measures::ComputeDensities(Rows({{0.0, 0.0}, {2.0, 0.0}}),
                                               nullptr, {}, 1);
  EXPECT_EQ(pair.task_density[0], -2.0);
  EXPECT_EQ(pair.task_density[1], -2.0);

  // Point 0 sits at distance 1 from its nearest same-class and other-class
  // neighbours.
  const Matrix pts = Rows({{0.0}, {1.0}, {-1.0}, {10.0}});
  const std::vector<int32_t> y{0, 0, 1, 1};
  const auto d = measures::ComputeDensities(pts, nullptr, y, 1);
  EXPECT_EQ(d.relative_density[0], 0.0);
}

TEST(DensitiesTest, TwoClusterSetMatchesBruteForce) {
  const Matrix pts =
      Rows({{0.0, 0.0}, {0.5, 0.1}, {0.2, 0.7}, {5.0, 5.0}, {5.3, 4.6}, {4.8, 5.9}});
  const std::vector<int32_t> y{0, 0, 0, 1, 1, 1};
  std::vector<std::vector<double>> rows;
  for (int64_t i = 0; i < pts.rows(); ++i) rows.push_back({pts(i, 0), pts(i, 1)});
  const auto d = measures::ComputeDensities(pts, &pts, y, 2);
  const auto all = oracle::ReferenceKnnDistance(rows, 2, measures::Candidates::kAll, y);
  const auto same =
      oracle::ReferenceKnnDistance(rows, 2, measures::Candidates::kSameGroup, y);
  const auto other =
      oracle::ReferenceKnnDistance(rows, 2, measures::Candidates::kOtherGroup, y);
  for (int64_t i = 0; i < 6; ++i) {
    EXPECT_EQ(d.task_density[i], -all[i]);
    EXPECT_EQ(d.semantic_density[i], -all[i]);
    EXPECT_EQ(d.relative_density[i], other[i] - same[i]);
  }
}

TEST(TrainingDynamicsTest, AverageAndVariability) {
  const std::vector<Matrix> ep{Log(Rows({{0.4, 0.6}})), Log(Rows({{0.6, 0.4}}))};
  const auto td = measures::ComputeTrainingDynamics(ep, std::vector<int32_t>{1});
  EXPECT_NEAR(td.avg_confidence[0], 0.5, 1e-12);
  EXPECT_NEAR(td.variability[0], 0.1, 1e-12);
}

TEST(TrainingDynamicsTest, LearnedLateIsNotForgotten) {
  const std::vector<Matrix> ep{Log(Rows({{0.4, 0.6}})), Log(Rows({{0.6, 0.4}}))};
  const auto td = measures::ComputeTrainingDynamics(ep, std::vector<int32_t>{0});
  EXPECT_EQ(td.forgetting[0], 0.0);
  EXPECT_NEAR(td.aum[0], 0.0, 1e-12);
  EXPECT_NEAR(td.correctness[0], 0.5, 1e-12);
}

TEST(TrainingDynamicsTest, AlternatingCorrectnessCountsTwoForgets) {
  std::vector<Matrix> ep;
  for (int e = 0; e < 4; ++e) {
    ep.push_back(Log(e % 2 == 0 ? Rows({{0.8, 0.2}}) : Rows({{0.3, 0.7}})));
  }
  const auto td = measures::ComputeTrainingDynamics(ep, std::vector<int32_t>{0});
  EXPECT_EQ(td.forgetting[0], 2.0);
}

TEST(TrainingDynamicsTest, NeverCorrectIsZero) {
  const std::vector<Matrix> ep{Log(Rows({{0.2, 0.8}})), Log(Rows({{0.1, 0.9}})),
                               Log(Rows({{0.3, 0.7}}))};
  const auto td = measures::ComputeTrainingDynamics(ep, std::vector<int32_t>{0});
  EXPECT_EQ(td.forgetting[0], 0.0);
}

TEST(EnsembleTest, IdenticalMembersDoNotDisagree) {
  const Matrix m = Log(Rows({{0.7, 0.3}}));
  const auto u = measures::ComputeEnsembleUncertainty({m, m}, std::vector<int32_t>{0});
  EXPECT_NEAR(u.bald[0], 0.0, 1e-12);
  EXPECT_EQ(u.variation_ratio[0], 0.0);
  EXPECT_NEAR(u.variability[0], 0.0, 1e-12);
}

TEST(EnsembleTest, OppositeOneHotMembers) {
  const std::vector<Matrix> members{Log(Rows({{1.0, 1e-30}})),
                                    Log(Rows({{1e-30, 1.0}}))};
  const auto u = measures::ComputeEnsembleUncertainty(members, std::vector<int32_t>{0});
  EXPECT_NEAR(u.entropy[0], 0.693147, kTol);
  EXPECT_NEAR(u.bald[0], 0.693147, kTol);
  EXPECT_EQ(u.variation_ratio[0], 0.5);
}

TEST(EnsembleTest, SingleMemberEl2n) {
  const auto u = measures::ComputeEnsembleUncertainty({Log(Rows({{0.6, 0.4}}))},
                                                      std::vector<int32_t>{0});
  EXPECT_NEAR(u.el2n[0], 0.565685, kTol);
  EXPECT_NEAR(u.confidence[0], 0.6, 1e-12);
}

TEST(PllTest, SumsAndRejectsEmpty) {
  const auto tokens = TokenLogprobs::FromSequences({{-1.0f, -2.0f}, {-0.5f}});
  const Vector pll = measures::PseudoLogLikelihood(tokens);
  EXPECT_EQ(pll[0], -3.0);
  EXPECT_EQ(pll[1], -0.5);
  EXPECT_EQ(measures::PseudoLogLikelihood(tokens, true)[0], -1.5);
  try {
    measures::PseudoLogLikelihood(TokenLogprobs::FromSequences({{-1.0f}, {}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTokenSequence);
    EXPECT_EQ(e.index(), 1);
  }
}

TEST(RegistryTest, CategoryCounts) {
  const auto& reg = MeasureRegistry();
  ASSERT_EQ(reg.size(), 23u);
  int counts[5] = {};
  for (const auto& s : reg) ++counts[static_cast<int>(s.category)];
  EXPECT_EQ(counts[0], 5);
  EXPECT_EQ(counts[1], 4);
  EXPECT_EQ(counts[2], 6);
  EXPECT_EQ(counts[3], 6);
  EXPECT_EQ(counts[4], 2);
  EXPECT_EQ(RegistryIndex("pll"), 22);
  EXPECT_EQ(RegistryIndex("no_such_measure"), -1);
}

oracle::SynthConfig SmallSynth(uint64_t seed) {
  oracle::SynthConfig cfg;
  cfg.n_samples = 40;
  cfg.n_classes = 3;
  cfg.epochs = 4;
  cfg.seeds = 3;
  cfg.mc_passes = 3;
  cfg.clf_dim = 4;
  cfg.sent_dim = 3;
  cfg.planted_noise_fraction = 0.1;
  cfg.rng_seed = seed;
  return cfg;
}

TEST(ComputeAllTest, FullBundleHasAllColumns) {
  const MeasureMatrix m = measures::ComputeAll(oracle::GenerateBundle(SmallSynth(1)));
  EXPECT_EQ(m.rows(), 40);
  ASSERT_EQ(m.cols(), 23);
  for (int64_t j = 0; j < 23; ++j) EXPECT_EQ(m.columns[j], MeasureRegistry()[j]);
  EXPECT_TRUE(m.values.allFinite());
  EXPECT_EQ(m.label_source, LabelSource::kGold);
}

TEST(ComputeAllTest, MissingMcSkipsSixColumns) {
  oracle::SynthConfig cfg = SmallSynth(2);
  cfg.with_mc = false;
  const MeasureMatrix m = measures::ComputeAll(oracle::GenerateBundle(cfg));
  EXPECT_EQ(m.cols(), 17);
  ASSERT_EQ(m.skipped.size(), 6u);
  for (const auto& name : m.skipped) EXPECT_EQ(name.rfind("mc_", 0), 0u);
}

TEST(ComputeAllTest, ExplicitRequestNeedsInputs) {
  oracle::SynthConfig cfg = SmallSynth(3);
  cfg.with_sent_embedding = false;
  const RunBundle b = oracle::GenerateBundle(cfg);
  measures::ComputeOptions opts;
  opts.selected = std::vector<std::string>{"semantic_density"};
  try {
    measures::ComputeAll(b, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingInput);
  }
  opts.selected = std::vector<std::string>{"bogus"};
  try {
    measures::ComputeAll(b, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownMeasure);
  }
}

TEST(ComputeAllTest, SelectionFollowsRegistryOrder) {
  measures::ComputeOptions opts;
  opts.selected = std::vector<std::string>{"pll", "aum", "badge"};
  const MeasureMatrix m = measures::ComputeAll(oracle::GenerateBundle(SmallSynth(4)), opts);
  ASSERT_EQ(m.cols(), 3);
  EXPECT_EQ(m.columns[0].name, "badge");
  EXPECT_EQ(m.columns[1].name, "aum");
  EXPECT_EQ(m.columns[2].name, "pll");
}

TEST(ComputeAllTest, PseudoLabelsWithoutGold) {
  oracle::SynthConfig cfg = SmallSynth(5);
  cfg.with_labels = false;
  const RunBundle b = oracle::GenerateBundle(cfg);
  const MeasureMatrix m = measures::ComputeAll(b);
  EXPECT_EQ(m.label_source, LabelSource::kPseudo);
  EXPECT_EQ(m.labels, ResolveLabels(b));
}

TEST(InvariantTest, BoundsHoldOnSynthBundles) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const RunBundle b = oracle::GenerateBundle(SmallSynth(seed));
    const MeasureMatrix m = measures::ComputeAll(b);
    const double ln_c = std::log(static_cast<double>(b.n_classes));
    for (const char* name : {"static_entropy", "ens_entropy", "mc_entropy"}) {
      const auto col = m.values.col(m.ColumnIndex(name));
      EXPECT_GE(col.minCoeff(), 0.0) << name;
      EXPECT_LE(col.maxCoeff(), ln_c + 1e-9) << name;
    }
    for (const char* name : {"ens_bald", "mc_bald"}) {
      EXPECT_GE(m.values.col(m.ColumnIndex(name)).minCoeff(), -1e-12);
    }
    for (const char* name : {"ens_variation_ratio", "mc_variation_ratio"}) {
      const auto col = m.values.col(m.ColumnIndex(name));
      EXPECT_GE(col.minCoeff(), 0.0);
      EXPECT_LT(col.maxCoeff(), 1.0);
    }
    for (const char* name : {"variability", "ens_variability", "mc_variability"}) {
      const auto col = m.values.col(m.ColumnIndex(name));
      EXPECT_GE(col.minCoeff(), 0.0);
      EXPECT_LE(col.maxCoeff(), 0.5);
    }
    const double max_forget = std::ceil((b.num_epochs() - 1) / 2.0);
    EXPECT_LE(m.values.col(m.ColumnIndex("forgetting")).maxCoeff(), max_forget);
  }
}

TEST(InvariantTest, AumIsShiftInvariant) {
  const RunBundle b = oracle::GenerateBundle(SmallSynth(7));
  const auto labels = ResolveLabels(b);
  std::vector<Matrix> ep = ToStack(b.epoch_logprobs, false);
  const Vector base = measures::ComputeTrainingDynamics(ep, labels).aum;
  for (size_t e = 0; e < ep.size(); ++e) {
    for (int64_t i = 0; i < ep[e].rows(); ++i) {
      ep[e].row(i).array() += 0.37 * static_cast<double>(i % 5) - 0.9;
    }
  }
  const Vector shifted = measures::ComputeTrainingDynamics(ep, labels).aum;
  EXPECT_LE((base - shifted).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InvariantTest, BadgeEqualsOuterProductNorm) {
  const RunBundle b = oracle::GenerateBundle(SmallSynth(8));
  const auto labels = ResolveLabels(b);
  const Matrix p = ToMatrix(b.static_probs);
  const Matrix z = ToMatrix(b.clf_embedding);
  const Vector badge = measures::BadgeScore(p, labels, z);
  for (int64_t i = 0; i < p.rows(); ++i) {
    Vector r = p.row(i).transpose();
    r[labels[i]] -= 1.0;
    const Matrix g = r * z.row(i);
    EXPECT_NEAR(badge[i], g.norm(), 1e-12);
  }
}

TEST(InvariantTest, PermutationEquivariance) {
  const RunBundle b = oracle::GenerateBundle(SmallSynth(9));
  const int64_t n = b.n_samples;
  std::vector<int64_t> perm(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) perm[i] = (i * 7 + 3) % n;
  RunBundle p = b;
  auto permute = [&](const FloatTensor& src, FloatTensor& dst) {
    const int64_t layers = src.rank() == 3 ? src.dim(0) : 1;
    const int64_t cols = src.shape.back();
    for (int64_t l = 0; l < layers; ++l) {
      for (int64_t i = 0; i < n; ++i) {
        for (int64_t j = 0; j < cols; ++j) {
          dst.data[(l * n + i) * cols + j] = src.data[(l * n + perm[i]) * cols + j];
        }
      }
    }
  };
  permute(b.static_probs, p.static_probs);
  permute(b.epoch_logprobs, p.epoch_logprobs);
  permute(b.seed_logprobs, p.seed_logprobs);
  permute(*b.mc_logprobs, *p.mc_logprobs);
  permute(b.clf_embedding, p.clf_embedding);
  permute(*b.sent_embedding, *p.sent_embedding);
  std::vector<std::vector<float>> seqs;
  for (int64_t i = 0; i < n; ++i) {
    const auto s = b.token_logprobs->Sample(perm[i]);
    seqs.emplace_back(s.begin(), s.end());
  }
  p.token_logprobs = TokenLogprobs::FromSequences(seqs);
  for (int64_t i = 0; i < n; ++i) (*p.labels)[i] = (*b.labels)[perm[i]];

  const MeasureMatrix a = measures::ComputeAll(b);
  const MeasureMatrix c = measures::ComputeAll(p);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < a.cols(); ++j) {
      EXPECT_NEAR(c.values(i, j), a.values(perm[i], j),
                  1e-12 * std::max(1.0, std::abs(a.values(perm[i], j))));
    }
  }
}

TEST(InvariantTest, MatchesReferenceImplementation) {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    const RunBundle b = oracle::GenerateBundle(SmallSynth(100 + seed));
    const MeasureMatrix engine = measures::ComputeAll(b);
    const MeasureMatrix ref = oracle::ReferenceMeasures(b);
    ASSERT_EQ(engine.cols(), ref.cols());
    for (int64_t i = 0; i < engine.rows(); ++i) {
      for (int64_t j = 0; j < engine.cols(); ++j) {
        EXPECT_LE(testing::RelErr(engine.values(i, j), ref.values(i, j)), 1e-9)
            << engine.columns[j].name << " row " << i;
      }
    }
  }
}

}  // namespace
}  // namespace infoverse
