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

#ifndef INFOVERSE_RNG_H_
#define INFOVERSE_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace infoverse {

// Seeded generator whose output stream is identical on every platform.
//
// std::mt19937_64 has a standard-mandated sequence, but the std::*_distribution
// adaptors are implementation-defined, so every draw below is derived from the
// raw 64-bit words directly.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform on [0, bound); rejection sampling removes modulo bias.
  uint64_t UniformInt(uint64_t bound);

  // Standard normal via Box-Muller (no cached second variate).
  double Normal();

  // First `k` entries of a seeded Fisher-Yates shuffle of [0, n).
  std::vector<int64_t> SampleWithoutReplacement(int64_t n, int64_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace infoverse

#endif  // INFOVERSE_RNG_H_
