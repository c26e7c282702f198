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

#include <benchmark/benchmark.h>

#include "infoverse/measures.h"
#include "infoverse/oracle.h"
#include "infoverse/rng.h"
#include "infoverse/space.h"

namespace infoverse {
namespace {

Matrix RandomPoints(int64_t n, int64_t d) {
  Rng rng(7);
  Matrix m(n, d);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < d; ++j) m(i, j) = rng.Normal();
  }
  return m;
}

void BM_KnnDistance(benchmark::State& state) {
  const Matrix pts = RandomPoints(state.range(0), 16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(measures::KnnDistance(pts, measures::kDefaultKnn));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KnnDistance)->RangeMultiplier(2)->Range(256, 4096)->Complexity();

void BM_ComputeAll(benchmark::State& state) {
  oracle::SynthConfig cfg;
  cfg.n_samples = state.range(0);
  cfg.n_classes = 4;
  cfg.planted_noise_fraction = 0.1;
  const RunBundle b = oracle::GenerateBundle(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(measures::ComputeAll(b));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeAll)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_NormalizeAndPca(benchmark::State& state) {
  const Matrix raw = RandomPoints(state.range(0), 23);
  for (auto _ : state) {
    const FeatureMatrix f = space::Normalize(raw, {});
    benchmark::DoNotOptimize(space::PcaFeatureSelectColumns(f, 12));
  }
}
BENCHMARK(BM_NormalizeAndPca)->Arg(10000);

}  // namespace
}  // namespace infoverse
