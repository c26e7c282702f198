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

#ifndef INFOVERSE_ERROR_H_
#define INFOVERSE_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace infoverse {

enum class ErrorCode {
  kMissingFile,
  kBadManifest,
  kShapeMismatch,
  kProbabilityRowNotNormalized,
  kLabelOutOfRange,
  kEmptyBundle,
  kIoFailure,
  kTooFewCandidates,
  kEmptyTokenSequence,
  kMissingInput,
  kUnknownMeasure,
  kCoordShapeMismatch,
  kNonPositiveScore,
  kNonPositiveBeta,
  kBudgetExceedsN,
  kUnknownMethod,
  kCombinatorialBlowup,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures in the library are reported with this exception.
// `index()` carries the offending row / sample / class when one exists, -1
// otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int64_t index = -1);

  ErrorCode code() const { return code_; }
  int64_t index() const { return index_; }

 private:
  ErrorCode code_;
  int64_t index_;
};

}  // namespace infoverse

#endif  // INFOVERSE_ERROR_H_
