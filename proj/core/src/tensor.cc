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

#include "infoverse/tensor.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "infoverse/error.h"

namespace infoverse {
namespace {

template <typename T>
void WriteRaw(const std::filesystem::path& file, std::span<const T> values) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + file.string());
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (const T& v : values) {
      char bytes[sizeof(T)];
      std::memcpy(bytes, &v, sizeof(T));
      for (size_t b = sizeof(T); b-- > 0;) out.put(bytes[b]);
    }
  }
  if (!out) throw Error(ErrorCode::kIoFailure, "short write to " + file.string());
}

template <typename T>
std::vector<T> ReadRaw(const std::filesystem::path& file, int64_t count) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(file, ec)) {
    throw Error(ErrorCode::kMissingFile, file.string());
  }
  const auto bytes = std::filesystem::file_size(file, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot stat " + file.string());
  const auto expected = static_cast<uintmax_t>(count) * sizeof(T);
  if (bytes != expected) {
    throw Error(ErrorCode::kShapeMismatch,
                file.filename().string() + " holds " + std::to_string(bytes) +
                    " bytes, shape requires " + std::to_string(expected));
  }
  std::vector<T> values(static_cast<size_t>(count));
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + file.string());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(expected));
  if (!in) throw Error(ErrorCode::kIoFailure, "short read from " + file.string());
  if constexpr (std::endian::native != std::endian::little) {
    for (T& v : values) {
      char b[sizeof(T)];
      std::memcpy(b, &v, sizeof(T));
      for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
      std::memcpy(&v, b, sizeof(T));
    }
  }
  return values;
}

}  // namespace

Matrix ToMatrix(const FloatTensor& tensor) {
  const int64_t rows = tensor.dim(0);
  const int64_t cols = tensor.dim(1);
  Matrix m(rows, cols);
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) m(i, j) = tensor.at(i, j);
  }
  return m;
}

Matrix LayerToMatrix(const FloatTensor& tensor, int64_t layer) {
  const int64_t rows = tensor.dim(1);
  const int64_t cols = tensor.dim(2);
  Matrix m(rows, cols);
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < cols; ++j) m(i, j) = tensor.at(layer, i, j);
  }
  return m;
}

std::vector<Matrix> ToStack(const FloatTensor& tensor, bool exponentiate) {
  std::vector<Matrix> stack;
  stack.reserve(static_cast<size_t>(tensor.dim(0)));
  for (int64_t l = 0; l < tensor.dim(0); ++l) {
    Matrix m = LayerToMatrix(tensor, l);
    if (exponentiate) m = m.array().exp().matrix();
    stack.push_back(std::move(m));
  }
  return stack;
}

FloatTensor FromMatrix(const Matrix& matrix) {
  FloatTensor t({matrix.rows(), matrix.cols()});
  for (int64_t i = 0; i < matrix.rows(); ++i) {
    for (int64_t j = 0; j < matrix.cols(); ++j) {
      t.at(i, j) = static_cast<float>(matrix(i, j));
    }
  }
  return t;
}

void WriteRawFile(const std::filesystem::path& file,
                  std::span<const float> values) {
  WriteRaw(file, values);
}
void WriteRawFile(const std::filesystem::path& file,
                  std::span<const int32_t> values) {
  WriteRaw(file, values);
}
std::vector<float> ReadRawF32(const std::filesystem::path& file,
                              int64_t count) {
  return ReadRaw<float>(file, count);
}
std::vector<int32_t> ReadRawI32(const std::filesystem::path& file,
                                int64_t count) {
  return ReadRaw<int32_t>(file, count);
}

}  // namespace infoverse
