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

#ifndef INFOVERSE_TESTS_TEST_UTIL_H_
#define INFOVERSE_TESTS_TEST_UTIL_H_

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "infoverse/bundle.h"
#include "infoverse/tensor.h"

namespace infoverse::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("infoverse_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string ReadBytes(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

inline Matrix Rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<int64_t>(rows.size()),
           static_cast<int64_t>(rows.begin()->size()));
  int64_t i = 0;
  for (const auto& r : rows) {
    int64_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline Matrix Log(const Matrix& m) { return m.array().log().matrix(); }

// Relative error with an absolute floor of 1 (|a - b| / max(1, |a|, |b|)).
inline double RelErr(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Minimal 2-class bundle where every stack repeats the static model.
inline RunBundle SmallBundle(const std::vector<std::vector<float>>& probs,
                             const std::vector<std::vector<float>>& embedding) {
  RunBundle b;
  b.n_samples = static_cast<int64_t>(probs.size());
  b.n_classes = static_cast<int64_t>(probs.front().size());
  const int64_t n = b.n_samples;
  const int64_t c = b.n_classes;
  b.static_probs = FloatTensor({n, c});
  b.epoch_logprobs = FloatTensor({1, n, c});
  b.seed_logprobs = FloatTensor({1, n, c});
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t k = 0; k < c; ++k) {
      b.static_probs.at(i, k) = probs[i][k];
      b.epoch_logprobs.at(0, i, k) = std::log(probs[i][k]);
      b.seed_logprobs.at(0, i, k) = std::log(probs[i][k]);
    }
  }
  const int64_t d = static_cast<int64_t>(embedding.front().size());
  b.clf_embedding = FloatTensor({n, d});
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < d; ++j) b.clf_embedding.at(i, j) = embedding[i][j];
  }
  return b;
}

}  // namespace infoverse::testing

#endif  // INFOVERSE_TESTS_TEST_UTIL_H_
