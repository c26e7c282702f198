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

#ifndef INFOVERSE_FEATURE_IO_H_
#define INFOVERSE_FEATURE_IO_H_

#include <filesystem>
#include <string>

#include "infoverse/measures.h"
#include "infoverse/select.h"
#include "infoverse/space.h"

namespace infoverse {

// A measure matrix on disk is a raw little-endian f32 payload at `path`
// ([N x F], row-major) with a JSON sidecar at `path` + ".json" naming the
// columns and pointing at the labels (i32) and epoch-correctness (f32)
// payloads written next to it.
void WriteMeasureMatrix(const MeasureMatrix& m, const std::filesystem::path& path);
// Accepts either the payload path or the sidecar path.
MeasureMatrix ReadMeasureMatrix(const std::filesystem::path& path);

// Normalized features in the same raw-f32 + sidecar layout; the sidecar also
// records per-column mean/std and constant-column flags.
void WriteFeatureMatrix(const FeatureMatrix& f, const std::filesystem::path& path);

// CSV exports; headers are the canonical measure names.
void WriteMeasureCsv(const MeasureMatrix& m, const std::filesystem::path& path);
void WriteFeatureCsv(const FeatureMatrix& f, const std::filesystem::path& path);
void WriteCorrelationCsv(const CorrelationMatrix& c,
                         const std::filesystem::path& path);
// index, avg_confidence, variability, correctness, proj_x, proj_y
void WriteDataMapCsv(const MeasureMatrix& m, const Matrix& projection,
                     const std::filesystem::path& path);
// Two numeric columns per line; a non-numeric first line is a header.
Matrix ReadCoordinatesCsv(const std::filesystem::path& path);

std::string SelectionResultToJson(const SelectionResult& result);
SelectionResult SelectionResultFromJson(const std::string& text);
void WriteSelectionResult(const SelectionResult& result,
                          const std::filesystem::path& path);

// Shortest round-trip decimal form.
std::string FormatDouble(double v);

}  // namespace infoverse

#endif  // INFOVERSE_FEATURE_IO_H_
