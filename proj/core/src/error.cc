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

#include "infoverse/error.h"

namespace infoverse {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kBadManifest: return "BadManifest";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kProbabilityRowNotNormalized:
      return "ProbabilityRowNotNormalized";
    case ErrorCode::kLabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::kEmptyBundle: return "EmptyBundle";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kTooFewCandidates: return "TooFewCandidates";
    case ErrorCode::kEmptyTokenSequence: return "EmptyTokenSequence";
    case ErrorCode::kMissingInput: return "MissingInput";
    case ErrorCode::kUnknownMeasure: return "UnknownMeasure";
    case ErrorCode::kCoordShapeMismatch: return "CoordShapeMismatch";
    case ErrorCode::kNonPositiveScore: return "NonPositiveScore";
    case ErrorCode::kNonPositiveBeta: return "NonPositiveBeta";
    case ErrorCode::kBudgetExceedsN: return "BudgetExceedsN";
    case ErrorCode::kUnknownMethod: return "UnknownMethod";
    case ErrorCode::kCombinatorialBlowup: return "CombinatorialBlowup";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, int64_t index)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      index_(index) {}

}  // namespace infoverse
