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

#ifndef INFOVERSE_BUNDLE_H_
#define INFOVERSE_BUNDLE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoverse/tensor.h"

namespace infoverse {

// Ragged per-sample token log-probabilities, stored flat with N+1 offsets.
struct TokenLogprobs {
  std::vector<float> values;
  std::vector<int32_t> offsets;

  int64_t num_samples() const {
    return offsets.empty() ? 0 : static_cast<int64_t>(offsets.size()) - 1;
  }
  std::span<const float> Sample(int64_t i) const {
    return std::span<const float>(values).subspan(
        offsets[i], offsets[i + 1] - offsets[i]);
  }
  static TokenLogprobs FromSequences(
      const std::vector<std::vector<float>>& sequences);
};

// Every model output the engine consumes for one dataset. Stacked tensors are
// [layers x N x C] log-probabilities; the static model is stored as plain
// probabilities.
struct RunBundle {
  int64_t n_samples = 0;
  int64_t n_classes = 0;
  FloatTensor static_probs;    // [N, C]
  FloatTensor epoch_logprobs;  // [E, N, C]
  FloatTensor seed_logprobs;   // [T, N, C]
  std::optional<FloatTensor> mc_logprobs;     // [M, N, C]
  FloatTensor clf_embedding;                  // [N, d]
  std::optional<FloatTensor> sent_embedding;  // [N, d']
  std::optional<TokenLogprobs> token_logprobs;
  std::optional<std::vector<int32_t>> labels;
  std::string notes;

  int64_t num_epochs() const { return epoch_logprobs.dim(0); }
  int64_t num_seeds() const { return seed_logprobs.dim(0); }
  int64_t num_mc_passes() const {
    return mc_logprobs ? mc_logprobs->dim(0) : 0;
  }
};

enum class LabelSource { kGold, kPseudo };

inline constexpr int kManifestVersion = 1;
inline constexpr double kProbRowTolerance = 1e-6;
inline constexpr double kLogprobRowTolerance = 1e-5;

struct TensorEntry {
  std::string name;
  std::string path;
  std::vector<int64_t> shape;
  std::string dtype;  // "f32" or "i32"
};

struct Manifest {
  int version = kManifestVersion;
  int64_t n_samples = 0;
  int64_t n_classes = 0;
  std::vector<TensorEntry> tensors;
  bool has_labels = false;
  std::string notes;
};

Manifest ReadManifest(const std::filesystem::path& file);
void WriteManifest(const Manifest& manifest, const std::filesystem::path& file);

// Checks every RunBundle invariant. Throws Error on the first violation.
void ValidateBundle(const RunBundle& bundle);

RunBundle LoadBundle(const std::filesystem::path& dir);
void WriteBundle(const RunBundle& bundle, const std::filesystem::path& dir);

// Gold labels when present, otherwise argmax of static_probs (lowest class
// index wins ties).
std::vector<int32_t> ResolveLabels(const RunBundle& bundle);

}  // namespace infoverse

#endif  // INFOVERSE_BUNDLE_H_
