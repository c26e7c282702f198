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

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "infoverse/error.h"
#include "json.hpp"

namespace infoverse {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string ShapeString(const std::vector<int64_t>& shape) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << "]";
  return os.str();
}

void ExpectShape(const std::string& name, const std::vector<int64_t>& actual,
                 const std::vector<int64_t>& expected) {
  if (actual != expected) {
    throw Error(ErrorCode::kShapeMismatch, name + " has shape " +
                                               ShapeString(actual) +
                                               ", expected " +
                                               ShapeString(expected));
  }
}

void ExpectStackShape(const std::string& name, const FloatTensor& t, int64_t n,
                      int64_t c) {
  if (t.rank() != 3 || t.dim(0) < 1 || t.dim(1) != n || t.dim(2) != c ||
      t.size() != FloatTensor::NumElements(t.shape)) {
    throw Error(ErrorCode::kShapeMismatch,
                name + " has shape " + ShapeString(t.shape) +
                    ", expected [L>=1 x " + std::to_string(n) + " x " +
                    std::to_string(c) + "]");
  }
}

void ExpectEmbeddingShape(const std::string& name, const FloatTensor& t,
                          int64_t n) {
  if (t.rank() != 2 || t.dim(0) != n || t.dim(1) < 1 ||
      t.size() != FloatTensor::NumElements(t.shape)) {
    throw Error(ErrorCode::kShapeMismatch,
                name + " has shape " + ShapeString(t.shape) + ", expected [" +
                    std::to_string(n) + " x d>=1]");
  }
  for (int64_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t.data[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  name + " has a non-finite entry in row " +
                      std::to_string(i / t.dim(1)),
                  i / t.dim(1));
    }
  }
}

void CheckProbabilityRows(const std::string& name, const float* rows,
                          int64_t n, int64_t c, bool log_space,
                          int64_t row_offset) {
  const double tolerance = log_space ? kLogprobRowTolerance : kProbRowTolerance;
  for (int64_t i = 0; i < n; ++i) {
    double sum = 0.0;
    bool valid = true;
    for (int64_t k = 0; k < c; ++k) {
      const double v = rows[i * c + k];
      if (log_space) {
        valid = valid && !std::isnan(v) && v <= 0.0 + tolerance;
        sum += std::exp(v);
      } else {
        valid = valid && v >= 0.0;
        sum += v;
      }
    }
    if (!valid || !(std::abs(sum - 1.0) <= tolerance)) {
      std::ostringstream os;
      os << name << " row " << (row_offset + i) << " sums to " << sum;
      throw Error(ErrorCode::kProbabilityRowNotNormalized, os.str(),
                  row_offset + i);
    }
  }
}

void CheckStack(const std::string& name, const FloatTensor& t) {
  const int64_t n = t.dim(1);
  const int64_t c = t.dim(2);
  for (int64_t l = 0; l < t.dim(0); ++l) {
    // Row index reported is the sample index within the layer.
    try {
      CheckProbabilityRows(name, t.data.data() + l * n * c, n, c, true, 0);
    } catch (const Error& e) {
      throw Error(e.code(),
                  std::string(e.what()) + " (layer " + std::to_string(l) + ")",
                  e.index());
    }
  }
}

const std::map<std::string, std::string>& FileNames() {
  static const std::map<std::string, std::string> names = {
      {"static_probs", "static_probs.f32"},
      {"epoch_logprobs", "epoch_logprobs.f32"},
      {"seed_logprobs", "seed_logprobs.f32"},
      {"mc_logprobs", "mc_logprobs.f32"},
      {"clf_embedding", "clf_embedding.f32"},
      {"sent_embedding", "sent_embedding.f32"},
      {"token_logprobs", "token_logprobs.f32"},
      {"token_offsets", "token_offsets.i32"},
      {"labels", "labels.i32"},
  };
  return names;
}

std::string DtypeOf(const std::string& name) {
  return (name == "labels" || name == "token_offsets") ? "i32" : "f32";
}

}  // namespace

TokenLogprobs TokenLogprobs::FromSequences(
    const std::vector<std::vector<float>>& sequences) {
  TokenLogprobs t;
  t.offsets.push_back(0);
  for (const auto& seq : sequences) {
    t.values.insert(t.values.end(), seq.begin(), seq.end());
    t.offsets.push_back(static_cast<int32_t>(t.values.size()));
  }
  return t;
}

Manifest ReadManifest(const fs::path& file) {
  std::error_code ec;
  if (!fs::is_regular_file(file, ec)) {
    throw Error(ErrorCode::kMissingFile, file.string());
  }
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + file.string());
  Manifest m;
  try {
    const json j = json::parse(in);
    m.version = j.at("version").get<int>();
    if (m.version != kManifestVersion) {
      throw Error(ErrorCode::kBadManifest,
                  "unsupported version " + std::to_string(m.version));
    }
    m.n_samples = j.at("n_samples").get<int64_t>();
    m.n_classes = j.at("n_classes").get<int64_t>();
    m.has_labels = j.at("has_labels").get<bool>();
    m.notes = j.value("notes", std::string());
    for (const auto& t : j.at("tensors")) {
      TensorEntry e;
      e.name = t.at("name").get<std::string>();
      e.path = t.at("path").get<std::string>();
      e.shape = t.at("shape").get<std::vector<int64_t>>();
      e.dtype = t.at("dtype").get<std::string>();
      if (e.dtype != "f32" && e.dtype != "i32") {
        throw Error(ErrorCode::kBadManifest,
                    e.name + " has unsupported dtype " + e.dtype);
      }
      for (int64_t d : e.shape) {
        if (d < 0) throw Error(ErrorCode::kBadManifest, e.name + " negative dim");
      }
      m.tensors.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kBadManifest, file.string() + ": " + e.what());
  }
  return m;
}

void WriteManifest(const Manifest& m, const fs::path& file) {
  json j;
  j["version"] = m.version;
  j["n_samples"] = m.n_samples;
  j["n_classes"] = m.n_classes;
  json tensors = json::array();
  for (const auto& e : m.tensors) {
    tensors.push_back({{"name", e.name},
                       {"path", e.path},
                       {"shape", e.shape},
                       {"dtype", e.dtype}});
  }
  j["tensors"] = std::move(tensors);
  j["has_labels"] = m.has_labels;
  j["notes"] = m.notes;
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + file.string());
  out << j.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + file.string());
}

void ValidateBundle(const RunBundle& b) {
  if (b.n_samples <= 0) {
    throw Error(ErrorCode::kEmptyBundle, "bundle has no samples");
  }
  if (b.n_classes < 2) {
    throw Error(ErrorCode::kShapeMismatch,
                "n_classes must be >= 2, got " + std::to_string(b.n_classes));
  }
  const int64_t n = b.n_samples;
  const int64_t c = b.n_classes;
  ExpectShape("static_probs", b.static_probs.shape, {n, c});
  if (b.static_probs.size() != n * c) {
    throw Error(ErrorCode::kShapeMismatch, "static_probs payload size");
  }
  ExpectStackShape("epoch_logprobs", b.epoch_logprobs, n, c);
  ExpectStackShape("seed_logprobs", b.seed_logprobs, n, c);
  if (b.mc_logprobs) ExpectStackShape("mc_logprobs", *b.mc_logprobs, n, c);
  ExpectEmbeddingShape("clf_embedding", b.clf_embedding, n);
  if (b.sent_embedding) {
    ExpectEmbeddingShape("sent_embedding", *b.sent_embedding, n);
  }
  if (b.token_logprobs) {
    const auto& t = *b.token_logprobs;
    if (t.num_samples() != n || t.offsets.front() != 0 ||
        t.offsets.back() != static_cast<int32_t>(t.values.size())) {
      throw Error(ErrorCode::kShapeMismatch,
                  "token_offsets must have N+1 entries spanning token_logprobs");
    }
    for (int64_t i = 0; i < n; ++i) {
      if (t.offsets[i + 1] < t.offsets[i]) {
        throw Error(ErrorCode::kShapeMismatch,
                    "token_offsets decrease at sample " + std::to_string(i), i);
      }
    }
  }
  if (b.labels) {
    if (static_cast<int64_t>(b.labels->size()) != n) {
      throw Error(ErrorCode::kShapeMismatch,
                  "labels has " + std::to_string(b.labels->size()) +
                      " entries, expected " + std::to_string(n));
    }
    for (int64_t i = 0; i < n; ++i) {
      const int32_t y = (*b.labels)[i];
      if (y < 0 || y >= c) {
        throw Error(ErrorCode::kLabelOutOfRange,
                    "label " + std::to_string(y) + " at sample " +
                        std::to_string(i) + " outside [0, " +
                        std::to_string(c) + ")",
                    i);
      }
    }
  }

  CheckProbabilityRows("static_probs", b.static_probs.data.data(), n, c, false,
                       0);
  CheckStack("epoch_logprobs", b.epoch_logprobs);
  CheckStack("seed_logprobs", b.seed_logprobs);
  if (b.mc_logprobs) CheckStack("mc_logprobs", *b.mc_logprobs);
}

RunBundle LoadBundle(const fs::path& dir) {
  const Manifest m = ReadManifest(dir / "manifest.json");
  RunBundle b;
  b.n_samples = m.n_samples;
  b.n_classes = m.n_classes;
  b.notes = m.notes;

  std::map<std::string, const TensorEntry*> entries;
  for (const auto& e : m.tensors) {
    if (!FileNames().count(e.name)) {
      throw Error(ErrorCode::kBadManifest, "unknown tensor " + e.name);
    }
    if (e.dtype != DtypeOf(e.name)) {
      throw Error(ErrorCode::kBadManifest,
                  e.name + " must have dtype " + DtypeOf(e.name));
    }
    if (!entries.emplace(e.name, &e).second) {
      throw Error(ErrorCode::kBadManifest, "duplicate tensor " + e.name);
    }
  }
  auto read_f32 = [&](const std::string& name) -> std::optional<FloatTensor> {
    auto it = entries.find(name);
    if (it == entries.end()) return std::nullopt;
    FloatTensor t;
    t.shape = it->second->shape;
    t.data = ReadRawF32(dir / it->second->path,
                        FloatTensor::NumElements(t.shape));
    return t;
  };
  auto require_f32 = [&](const std::string& name) {
    auto t = read_f32(name);
    if (!t) throw Error(ErrorCode::kMissingFile, "manifest lacks " + name);
    return std::move(*t);
  };

  b.static_probs = require_f32("static_probs");
  b.epoch_logprobs = require_f32("epoch_logprobs");
  b.seed_logprobs = require_f32("seed_logprobs");
  b.clf_embedding = require_f32("clf_embedding");
  b.mc_logprobs = read_f32("mc_logprobs");
  b.sent_embedding = read_f32("sent_embedding");

  const bool has_tokens = entries.count("token_logprobs");
  if (has_tokens != static_cast<bool>(entries.count("token_offsets"))) {
    throw Error(ErrorCode::kBadManifest,
                "token_logprobs and token_offsets must appear together");
  }
  if (has_tokens) {
    const auto& values = *entries.at("token_logprobs");
    const auto& offsets = *entries.at("token_offsets");
    if (values.shape.size() != 1 || offsets.shape.size() != 1) {
      throw Error(ErrorCode::kShapeMismatch, "token tensors must be 1-D");
    }
    TokenLogprobs t;
    t.values = ReadRawF32(dir / values.path, values.shape[0]);
    t.offsets = ReadRawI32(dir / offsets.path, offsets.shape[0]);
    b.token_logprobs = std::move(t);
  }

  if (auto it = entries.find("labels"); it != entries.end()) {
    if (!m.has_labels) {
      throw Error(ErrorCode::kBadManifest, "labels present but has_labels=false");
    }
    const auto& shape = it->second->shape;
    if (shape.size() != 1) {
      throw Error(ErrorCode::kShapeMismatch, "labels must be 1-D");
    }
    b.labels = ReadRawI32(dir / it->second->path, shape[0]);
  } else if (m.has_labels) {
    throw Error(ErrorCode::kMissingFile, "has_labels=true but no labels tensor");
  }

  ValidateBundle(b);
  return b;
}

void WriteBundle(const RunBundle& b, const fs::path& dir) {
  ValidateBundle(b);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string());

  Manifest m;
  m.n_samples = b.n_samples;
  m.n_classes = b.n_classes;
  m.has_labels = b.labels.has_value();
  m.notes = b.notes;

  auto put_f32 = [&](const std::string& name, const FloatTensor& t) {
    const std::string& path = FileNames().at(name);
    WriteRawFile(dir / path, std::span<const float>(t.data));
    m.tensors.push_back({name, path, t.shape, "f32"});
  };
  put_f32("static_probs", b.static_probs);
  put_f32("epoch_logprobs", b.epoch_logprobs);
  put_f32("seed_logprobs", b.seed_logprobs);
  if (b.mc_logprobs) put_f32("mc_logprobs", *b.mc_logprobs);
  put_f32("clf_embedding", b.clf_embedding);
  if (b.sent_embedding) put_f32("sent_embedding", *b.sent_embedding);
  if (b.token_logprobs) {
    const auto& t = *b.token_logprobs;
    WriteRawFile(dir / FileNames().at("token_logprobs"),
                 std::span<const float>(t.values));
    m.tensors.push_back({"token_logprobs", FileNames().at("token_logprobs"),
                         {static_cast<int64_t>(t.values.size())}, "f32"});
    WriteRawFile(dir / FileNames().at("token_offsets"),
                 std::span<const int32_t>(t.offsets));
    m.tensors.push_back({"token_offsets", FileNames().at("token_offsets"),
                         {static_cast<int64_t>(t.offsets.size())}, "i32"});
  }
  if (b.labels) {
    WriteRawFile(dir / FileNames().at("labels"),
                 std::span<const int32_t>(*b.labels));
    m.tensors.push_back({"labels", FileNames().at("labels"),
                         {static_cast<int64_t>(b.labels->size())}, "i32"});
  }
  WriteManifest(m, dir / "manifest.json");
}

std::vector<int32_t> ResolveLabels(const RunBundle& b) {
  if (b.labels) return *b.labels;
  std::vector<int32_t> out(static_cast<size_t>(b.n_samples));
  for (int64_t i = 0; i < b.n_samples; ++i) {
    int32_t best = 0;
    for (int32_t k = 1; k < b.n_classes; ++k) {
      if (b.static_probs.at(i, k) > b.static_probs.at(i, best)) best = k;
    }
    out[i] = best;
  }
  return out;
}

}  // namespace infoverse
