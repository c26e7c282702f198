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

#include "infoverse/feature_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "infoverse/error.h"
#include "json.hpp"

namespace infoverse {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kFeatureFormatVersion = 1;

fs::path Sidecar(const fs::path& payload) {
  return fs::path(payload.string() + ".json");
}

fs::path PayloadOf(const fs::path& path) {
  const std::string s = path.string();
  if (s.size() > 5 && s.ends_with(".json")) return fs::path(s.substr(0, s.size() - 5));
  return path;
}

std::ofstream OpenOut(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return out;
}

void WriteJson(const json& j, const fs::path& path) {
  std::ofstream out = OpenOut(path);
  out << j.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

json ReadJson(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kMissingFile, path.string());
  }
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadManifest, path.string() + ": " + e.what());
  }
}

std::vector<float> ToFloats(const Matrix& m) {
  std::vector<float> out;
  out.reserve(static_cast<size_t>(m.size()));
  for (int64_t i = 0; i < m.rows(); ++i) {
    for (int64_t j = 0; j < m.cols(); ++j) out.push_back(static_cast<float>(m(i, j)));
  }
  return out;
}

std::vector<float> ToFloats(const Vector& v) {
  std::vector<float> out;
  for (int64_t i = 0; i < v.size(); ++i) out.push_back(static_cast<float>(v[i]));
  return out;
}

json TensorJson(const std::string& name, const std::string& path,
                std::vector<int64_t> shape, const std::string& dtype) {
  return {{"name", name}, {"path", path}, {"shape", shape}, {"dtype", dtype}};
}

void WriteMatrixCsv(const Matrix& values, const std::vector<std::string>& header,
                    const fs::path& path) {
  std::ofstream out = OpenOut(path);
  for (size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << "\n";
  for (int64_t i = 0; i < values.rows(); ++i) {
    for (int64_t j = 0; j < values.cols(); ++j) {
      out << (j ? "," : "") << FormatDouble(values(i, j));
    }
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

MeasureSpec SpecFor(const std::string& name) {
  const int idx = RegistryIndex(name);
  if (idx < 0) throw Error(ErrorCode::kUnknownMeasure, name);
  return MeasureRegistry()[idx];
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void WriteMeasureMatrix(const MeasureMatrix& m, const fs::path& path) {
  const fs::path payload = PayloadOf(path);
  if (payload.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(payload.parent_path(), ec);
  }
  const std::string base = payload.filename().string();
  const int64_t n = m.rows();
  WriteRawFile(payload, std::span<const float>(ToFloats(m.values)));
  WriteRawFile(fs::path(payload.string() + ".labels.i32"),
               std::span<const int32_t>(m.labels));
  WriteRawFile(fs::path(payload.string() + ".correctness.f32"),
               std::span<const float>(ToFloats(m.epoch_correctness)));

  json j;
  j["version"] = kFeatureFormatVersion;
  j["kind"] = "measure_matrix";
  j["n_samples"] = n;
  j["n_features"] = m.cols();
  json cols = json::array();
  for (const auto& c : m.columns) cols.push_back(c.name);
  j["columns"] = cols;
  j["label_source"] = m.label_source == LabelSource::kGold ? "gold" : "pseudo";
  j["skipped"] = m.skipped;
  j["tensors"] = json::array({
      TensorJson("values", base, {n, m.cols()}, "f32"),
      TensorJson("labels", base + ".labels.i32", {n}, "i32"),
      TensorJson("epoch_correctness", base + ".correctness.f32",
                 {m.epoch_correctness.size()}, "f32"),
  });
  WriteJson(j, Sidecar(payload));
}

MeasureMatrix ReadMeasureMatrix(const fs::path& path) {
  const fs::path payload = PayloadOf(path);
  const json j = ReadJson(Sidecar(payload));
  const fs::path dir = payload.parent_path();
  MeasureMatrix m;
  try {
    if (j.at("kind") != "measure_matrix") {
      throw Error(ErrorCode::kBadManifest, "not a measure matrix sidecar");
    }
    const int64_t n = j.at("n_samples").get<int64_t>();
    const int64_t f = j.at("n_features").get<int64_t>();
    for (const auto& name : j.at("columns")) m.columns.push_back(SpecFor(name));
    if (static_cast<int64_t>(m.columns.size()) != f) {
      throw Error(ErrorCode::kShapeMismatch, "column count != n_features");
    }
    m.label_source =
        j.at("label_source") == "gold" ? LabelSource::kGold : LabelSource::kPseudo;
    m.skipped = j.value("skipped", std::vector<std::string>{});
    for (const auto& t : j.at("tensors")) {
      const std::string name = t.at("name");
      const fs::path file = dir / t.at("path").get<std::string>();
      const auto shape = t.at("shape").get<std::vector<int64_t>>();
      if (name == "values") {
        if (shape != std::vector<int64_t>{n, f}) {
          throw Error(ErrorCode::kShapeMismatch, "values shape");
        }
        const auto raw = ReadRawF32(file, n * f);
        m.values.resize(n, f);
        for (int64_t i = 0; i < n; ++i) {
          for (int64_t c = 0; c < f; ++c) m.values(i, c) = raw[i * f + c];
        }
      } else if (name == "labels") {
        m.labels = ReadRawI32(file, n);
      } else if (name == "epoch_correctness") {
        const auto raw = ReadRawF32(file, shape.at(0));
        m.epoch_correctness.resize(static_cast<int64_t>(raw.size()));
        for (size_t i = 0; i < raw.size(); ++i) m.epoch_correctness[i] = raw[i];
      }
    }
    if (static_cast<int64_t>(m.labels.size()) != n) {
      throw Error(ErrorCode::kMissingFile, "measure matrix lacks labels");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadManifest, Sidecar(payload).string() + ": " + e.what());
  }
  return m;
}

void WriteFeatureMatrix(const FeatureMatrix& f, const fs::path& path) {
  const fs::path payload = PayloadOf(path);
  if (payload.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(payload.parent_path(), ec);
  }
  WriteRawFile(payload, std::span<const float>(ToFloats(f.values)));
  json j;
  j["version"] = kFeatureFormatVersion;
  j["kind"] = "feature_matrix";
  j["n_samples"] = f.rows();
  j["n_features"] = f.cols();
  json cols = json::array();
  for (size_t c = 0; c < f.source_specs.size(); ++c) {
    cols.push_back({{"name", f.source_specs[c].name},
                    {"mean", f.norm_stats[c].mean},
                    {"std", f.norm_stats[c].std},
                    {"constant", static_cast<bool>(f.constant_columns[c])}});
  }
  j["columns"] = cols;
  j["tensors"] = json::array({TensorJson("values", payload.filename().string(),
                                         {f.rows(), f.cols()}, "f32")});
  WriteJson(j, Sidecar(payload));
}

void WriteMeasureCsv(const MeasureMatrix& m, const fs::path& path) {
  std::vector<std::string> header;
  for (const auto& c : m.columns) header.push_back(c.name);
  WriteMatrixCsv(m.values, header, path);
}

void WriteFeatureCsv(const FeatureMatrix& f, const fs::path& path) {
  std::vector<std::string> header;
  for (const auto& c : f.source_specs) header.push_back(c.name);
  WriteMatrixCsv(f.values, header, path);
}

void WriteCorrelationCsv(const CorrelationMatrix& c, const fs::path& path) {
  std::ofstream out = OpenOut(path);
  out << "measure";
  for (const auto& name : c.names) out << "," << name;
  out << "\n";
  for (int64_t i = 0; i < c.values.rows(); ++i) {
    out << (i < static_cast<int64_t>(c.names.size()) ? c.names[i] : std::to_string(i));
    for (int64_t j = 0; j < c.values.cols(); ++j) {
      out << "," << FormatDouble(c.values(i, j));
    }
    out << "\n";
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

void WriteDataMapCsv(const MeasureMatrix& m, const Matrix& projection,
                     const fs::path& path) {
  const int64_t conf = m.ColumnIndex("avg_confidence");
  const int64_t var = m.ColumnIndex("variability");
  if (conf < 0 || var < 0) {
    throw Error(ErrorCode::kMissingInput,
                "data map needs avg_confidence and variability columns");
  }
  if (projection.rows() != m.rows() || projection.cols() != 2) {
    throw Error(ErrorCode::kCoordShapeMismatch, "projection must be N x 2");
  }
  std::ofstream out = OpenOut(path);
  out << "index,avg_confidence,variability,correctness,proj_x,proj_y\n";
  for (int64_t i = 0; i < m.rows(); ++i) {
    const double correctness =
        i < m.epoch_correctness.size() ? m.epoch_correctness[i] : 0.0;
    out << i << "," << FormatDouble(m.values(i, conf)) << ","
        << FormatDouble(m.values(i, var)) << "," << FormatDouble(correctness)
        << "," << FormatDouble(projection(i, 0)) << ","
        << FormatDouble(projection(i, 1)) << "\n";
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

Matrix ReadCoordinatesCsv(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kMissingFile, path.string());
  }
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const char* b = cell.data();
      while (b < cell.data() + cell.size() && *b == ' ') ++b;
      auto [ptr, err] = std::from_chars(b, cell.data() + cell.size(), v);
      if (err != std::errc()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(ErrorCode::kCoordShapeMismatch,
                  "non-numeric coordinate line: " + line);
    }
    first = false;
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<int64_t>(rows.size()), 2);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2) {
      throw Error(ErrorCode::kCoordShapeMismatch,
                  "coordinate line " + std::to_string(i) + " has " +
                      std::to_string(rows[i].size()) + " values");
    }
    m(static_cast<int64_t>(i), 0) = rows[i][0];
    m(static_cast<int64_t>(i), 1) = rows[i][1];
  }
  return m;
}

std::string SelectionResultToJson(const SelectionResult& r) {
  json j;
  j["method"] = r.method;
  j["mode"] = std::string(ModeName(r.mode));
  j["seed"] = r.seed;
  j["beta"] = r.beta;
  j["knn_k"] = r.knn_k;
  j["indices"] = r.indices;
  j["gains"] = r.gains;
  j["total_logdet"] = r.total_logdet;
  return j.dump(2) + "\n";
}

SelectionResult SelectionResultFromJson(const std::string& text) {
  SelectionResult r;
  try {
    const json j = json::parse(text);
    r.method = j.at("method").get<std::string>();
    const auto mode = ParseMode(j.at("mode").get<std::string>());
    if (!mode) throw Error(ErrorCode::kBadManifest, "unknown mode");
    r.mode = *mode;
    r.seed = j.at("seed").get<uint64_t>();
    r.beta = j.at("beta").get<double>();
    r.knn_k = j.at("knn_k").get<int>();
    r.indices = j.at("indices").get<std::vector<int64_t>>();
    r.gains = j.at("gains").get<std::vector<double>>();
    r.total_logdet = j.at("total_logdet").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadManifest, e.what());
  }
  return r;
}

void WriteSelectionResult(const SelectionResult& result, const fs::path& path) {
  std::ofstream out = OpenOut(path);
  out << SelectionResultToJson(result);
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + path.string());
}

}  // namespace infoverse
