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

#ifndef INFOVERSE_TENSOR_H_
#define INFOVERSE_TENSOR_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace infoverse {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Dense row-major tensor with the shape carried alongside the payload.
template <typename T>
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<int64_t> s)
      : shape(std::move(s)), data(static_cast<size_t>(NumElements(shape))) {}

  static int64_t NumElements(const std::vector<int64_t>& s) {
    return std::accumulate(s.begin(), s.end(), int64_t{1},
                           std::multiplies<int64_t>());
  }
  int64_t size() const { return static_cast<int64_t>(data.size()); }
  int64_t rank() const { return static_cast<int64_t>(shape.size()); }
  int64_t dim(size_t i) const { return i < shape.size() ? shape[i] : 0; }

  T& at(int64_t i, int64_t j) { return data[i * shape[1] + j]; }
  const T& at(int64_t i, int64_t j) const { return data[i * shape[1] + j]; }
  T& at(int64_t l, int64_t i, int64_t j) {
    return data[(l * shape[1] + i) * shape[2] + j];
  }
  const T& at(int64_t l, int64_t i, int64_t j) const {
    return data[(l * shape[1] + i) * shape[2] + j];
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

using FloatTensor = Tensor<float>;

// [rows x cols] float tensor widened to double.
Matrix ToMatrix(const FloatTensor& tensor);
// Layer `layer` of a [L x N x C] tensor widened to double.
Matrix LayerToMatrix(const FloatTensor& tensor, int64_t layer);
// Every layer of a [L x N x C] tensor, optionally exponentiated.
std::vector<Matrix> ToStack(const FloatTensor& tensor, bool exponentiate);

FloatTensor FromMatrix(const Matrix& matrix);

// Raw little-endian payload files, no header.
void WriteRawFile(const std::filesystem::path& file,
                  std::span<const float> values);
void WriteRawFile(const std::filesystem::path& file,
                  std::span<const int32_t> values);
// Reads exactly `count` elements; a file of any other byte length is a
// ShapeMismatch.
std::vector<float> ReadRawF32(const std::filesystem::path& file, int64_t count);
std::vector<int32_t> ReadRawI32(const std::filesystem::path& file,
                                int64_t count);

}  // namespace infoverse

#endif  // INFOVERSE_TENSOR_H_
