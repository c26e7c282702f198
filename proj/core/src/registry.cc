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

namespace infoverse {

std::string_view BundleFieldName(BundleField field) {
  switch (field) {
    case BundleField::kStaticProbs: return "static_probs";
    case BundleField::kEpochLogprobs: return "epoch_logprobs";
    case BundleField::kSeedLogprobs: return "seed_logprobs";
    case BundleField::kMcLogprobs: return "mc_logprobs";
    case BundleField::kClfEmbedding: return "clf_embedding";
    case BundleField::kSentEmbedding: return "sent_embedding";
    case BundleField::kTokenLogprobs: return "token_logprobs";
  }
  return "unknown";
}

std::string_view CategoryName(MeasureCategory category) {
  switch (category) {
    case MeasureCategory::kStatic: return "static";
    case MeasureCategory::kTrainingDynamics: return "training_dynamics";
    case MeasureCategory::kModelUncertaintyEnsemble: return "ensemble_uncertainty";
    case MeasureCategory::kModelUncertaintyMC: return "mc_uncertainty";
    case MeasureCategory::kPretrainedKnowledge: return "pretrained_knowledge";
  }
  return "unknown";
}

const std::vector<MeasureSpec>& MeasureRegistry() {
  using C = MeasureCategory;
  using F = BundleField;
  static const std::vector<MeasureSpec> registry = [] {
    std::vector<MeasureSpec> r = {
        {"task_density", C::kStatic, {F::kClfEmbedding}},
        {"relative_density", C::kStatic, {F::kClfEmbedding}},
        {"static_confidence", C::kStatic, {F::kStaticProbs}},
        {"static_entropy", C::kStatic, {F::kStaticProbs}},
        {"badge", C::kStatic, {F::kStaticProbs, F::kClfEmbedding}},
        {"avg_confidence", C::kTrainingDynamics, {F::kEpochLogprobs}},
        {"variability", C::kTrainingDynamics, {F::kEpochLogprobs}},
        {"forgetting", C::kTrainingDynamics, {F::kEpochLogprobs}},
        {"aum", C::kTrainingDynamics, {F::kEpochLogprobs}},
    };
    const char* kUncertainty[] = {"el2n", "entropy", "bald", "variation_ratio",
                                  "confidence", "variability"};
    for (const char* base : kUncertainty) {
      r.push_back({std::string("ens_") + base, C::kModelUncertaintyEnsemble,
                   {F::kSeedLogprobs}});
    }
    for (const char* base : kUncertainty) {
      r.push_back({std::string("mc_") + base, C::kModelUncertaintyMC,
                   {F::kMcLogprobs}});
    }
    r.push_back({"semantic_density", C::kPretrainedKnowledge,
                 {F::kSentEmbedding}});
    r.push_back({"pll", C::kPretrainedKnowledge, {F::kTokenLogprobs}});
    return r;
  }();
  return registry;
}

int RegistryIndex(std::string_view name) {
  const auto& r = MeasureRegistry();
  for (size_t i = 0; i < r.size(); ++i) {
    if (r[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int64_t MeasureMatrix::ColumnIndex(std::string_view name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return static_cast<int64_t>(i);
  }
  return -1;
}

}  // namespace infoverse
