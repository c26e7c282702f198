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

#include "infoverse/bundle.h"

#include <cstring>
#include <filesystem>
#include <functional>

#include <gtest/gtest.h>

#include "infoverse/error.h"
#include "infoverse/oracle.h"
#include "test_util.h"

namespace infoverse {
namespace {

using testing::ReadBytes;
using testing::TempDir;

oracle::SynthConfig TinyConfig() {
  oracle::SynthConfig cfg;
  cfg.n_samples = 4;
  cfg.n_classes = 2;
  cfg.epochs = 2;
  cfg.seeds = 2;
  cfg.mc_passes = 2;
  cfg.clf_dim = 3;
  cfg.sent_dim = 2;
  cfg.rng_seed = 11;
  return cfg;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an infoverse::Error";
  return ErrorCode::kInvalidArgument;
}

TEST(BundleTest, SynthBundleRoundTrips) {
  TempDir dir;
  const RunBundle b = oracle::GenerateBundle(TinyConfig());
  WriteBundle(b, dir.path());
  const RunBundle loaded = LoadBundle(dir.path());
  EXPECT_EQ(loaded.n_samples, 4);
  EXPECT_EQ(loaded.static_probs, b.static_probs);
  EXPECT_EQ(loaded.epoch_logprobs, b.epoch_logprobs);
  EXPECT_EQ(loaded.seed_logprobs, b.seed_logprobs);
  EXPECT_EQ(loaded.mc_logprobs, b.mc_logprobs);
  EXPECT_EQ(loaded.clf_embedding, b.clf_embedding);
  EXPECT_EQ(loaded.sent_embedding, b.sent_embedding);
  EXPECT_EQ(loaded.token_logprobs->values, b.token_logprobs->values);
  EXPECT_EQ(loaded.token_logprobs->offsets, b.token_logprobs->offsets);
  EXPECT_EQ(loaded.labels, b.labels);
  EXPECT_EQ(loaded.notes, b.notes);
}

TEST(BundleTest, RewriteIsByteIdenticalAcrossRandomConfigs) {
  for (uint64_t seed = 0; seed < 12; ++seed) {
    oracle::SynthConfig cfg = TinyConfig();
    cfg.rng_seed = seed;
    cfg.n_samples = 5 + static_cast<int64_t>(seed * 3);
    cfg.n_classes = 2 + static_cast<int64_t>(seed % 3);
    cfg.with_labels = seed % 2 == 0;
    cfg.with_mc = seed % 3 != 0;
    TempDir a;
    TempDir b;
    WriteBundle(oracle::GenerateBundle(cfg), a.path());
    WriteBundle(LoadBundle(a.path()), b.path());
    for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
      const auto name = entry.path().filename();
      EXPECT_EQ(ReadBytes(entry.path()), ReadBytes(b.path() / name))
          << name << " seed " << seed;
    }
  }
}

TEST(BundleTest, PayloadIsRawLittleEndianFloat32) {
  TempDir dir;
  const RunBundle b = oracle::GenerateBundle(TinyConfig());
  WriteBundle(b, dir.path());
  const std::string bytes = ReadBytes(dir / "static_probs.f32");
  ASSERT_EQ(bytes.size(), 4u * 2u * sizeof(float));
  float first = 0.0f;
  std::memcpy(&first, bytes.data(), sizeof(float));
  EXPECT_EQ(first, b.static_probs.data[0]);
}

TEST(BundleTest, ShortTensorFileIsShapeMismatch) {
  TempDir dir;
  WriteBundle(oracle::GenerateBundle(TinyConfig()), dir.path());
  const std::vector<float> six(6, 0.5f);
  WriteRawFile(dir / "static_probs.f32", std::span<const float>(six));
  EXPECT_EQ(CodeOf([&] { LoadBundle(dir.path()); }), ErrorCode::kShapeMismatch);
}

TEST(BundleTest, UnnormalizedRowReportsRowIndex) {
  RunBundle b = oracle::GenerateBundle(TinyConfig());
  b.static_probs.at(2, 0) = 0.7f;
  b.static_probs.at(2, 1) = 0.7f;
  try {
    ValidateBundle(b);
    FAIL() << "expected ProbabilityRowNotNormalized";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProbabilityRowNotNormalized);
    EXPECT_EQ(e.index(), 2);
  }
}

TEST(BundleTest, UnnormalizedLogprobRowIsRejected) {
  RunBundle b = oracle::GenerateBundle(TinyConfig());
  b.epoch_logprobs.at(1, 3, 0) = 0.0f;  // exp sums past 1
  EXPECT_EQ(CodeOf([&] { ValidateBundle(b); }),
            ErrorCode::kProbabilityRowNotNormalized);
}

TEST(BundleTest, LabelOutOfRange) {
  RunBundle b = oracle::GenerateBundle(TinyConfig());
  (*b.labels)[1] = 2;
  EXPECT_EQ(CodeOf([&] { ValidateBundle(b); }), ErrorCode::kLabelOutOfRange);
  (*b.labels)[1] = -1;
  EXPECT_EQ(CodeOf([&] { ValidateBundle(b); }), ErrorCode::kLabelOutOfRange);
}

TEST(BundleTest, MismatchedStackShape) {
  RunBundle b = oracle::GenerateBundle(TinyConfig());
  b.seed_logprobs.shape = {2, 2, 4};
  EXPECT_EQ(CodeOf([&] { ValidateBundle(b); }), ErrorCode::kShapeMismatch);
}

TEST(BundleTest, MissingTensorFile) {
  TempDir dir;
  WriteBundle(oracle::GenerateBundle(TinyConfig()), dir.path());
  std::filesystem::remove(dir / "clf_embedding.f32");
  EXPECT_EQ(CodeOf([&] { LoadBundle(dir.path()); }), ErrorCode::kMissingFile);
  EXPECT_EQ(CodeOf([&] { LoadBundle(dir / "nowhere"); }),
            ErrorCode::kMissingFile);
}

TEST(BundleTest, AbsentLabelsFlagPseudoLabelMode) {
  TempDir dir;
  oracle::SynthConfig cfg = TinyConfig();
  cfg.with_labels = false;
  WriteBundle(oracle::GenerateBundle(cfg), dir.path());
  const Manifest m = ReadManifest(dir / "manifest.json");
  EXPECT_FALSE(m.has_labels);
  for (const auto& t : m.tensors) EXPECT_NE(t.name, "labels");
  EXPECT_FALSE(LoadBundle(dir.path()).labels.has_value());
}

TEST(BundleTest, EmptyBundleIsRejected) {
  TempDir dir;
  RunBundle b;
  b.n_classes = 2;
  EXPECT_EQ(CodeOf([&] { WriteBundle(b, dir.path()); }), ErrorCode::kEmptyBundle);
}

TEST(BundleTest, ManifestSchema) {
  TempDir dir;
  WriteBundle(oracle::GenerateBundle(TinyConfig()), dir.path());
  const Manifest m = ReadManifest(dir / "manifest.json");
  EXPECT_EQ(m.version, 1);
  EXPECT_EQ(m.n_samples, 4);
  EXPECT_EQ(m.n_classes, 2);
  EXPECT_TRUE(m.has_labels);
  bool saw_epochs = false;
  for (const auto& t : m.tensors) {
    if (t.name == "epoch_logprobs") {
      saw_epochs = true;
      EXPECT_EQ(t.shape, (std::vector<int64_t>{2, 4, 2}));
      EXPECT_EQ(t.dtype, "f32");
    }
    if (t.name == "labels") EXPECT_EQ(t.dtype, "i32");
  }
  EXPECT_TRUE(saw_epochs);
}

TEST(ResolveLabelsTest, GoldLabelsPassThrough) {
  RunBundle b = testing::SmallBundle({{0.2f, 0.8f}, {0.9f, 0.1f}}, {{0.f}, {1.f}});
  b.labels = std::vector<int32_t>{1, 0};
  EXPECT_EQ(ResolveLabels(b), (std::vector<int32_t>{1, 0}));
}

TEST(ResolveLabelsTest, PseudoLabelsAreStaticArgmax) {
  const RunBundle b =
      testing::SmallBundle({{0.2f, 0.8f}, {0.9f, 0.1f}}, {{0.f}, {1.f}});
  EXPECT_EQ(ResolveLabels(b), (std::vector<int32_t>{1, 0}));
}

TEST(ResolveLabelsTest, TiesGoToLowestClass) {
  const RunBundle b = testing::SmallBundle({{0.5f, 0.5f}}, {{0.f}});
  EXPECT_EQ(ResolveLabels(b), (std::vector<int32_t>{0}));
}

TEST(ResolveLabelsTest, PermutingSamplesPermutesPseudoLabels) {
  oracle::SynthConfig cfg = TinyConfig();
  cfg.n_samples = 9;
  cfg.n_classes = 3;
  cfg.with_labels = false;
  const RunBundle b = oracle::GenerateBundle(cfg);
  RunBundle reversed = b;
  for (int64_t i = 0; i < b.n_samples; ++i) {
    for (int64_t k = 0; k < b.n_classes; ++k) {
      reversed.static_probs.at(i, k) = b.static_probs.at(b.n_samples - 1 - i, k);
    }
  }
  const auto fwd = ResolveLabels(b);
  const auto rev = ResolveLabels(reversed);
  for (int64_t i = 0; i < b.n_samples; ++i) {
    EXPECT_EQ(rev[i], fwd[b.n_samples - 1 - i]);
  }
}

}  // namespace
}  // namespace infoverse
