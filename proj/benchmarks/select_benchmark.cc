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

#include "infoverse/rng.h"
#include "infoverse/select.h"

namespace infoverse {
namespace {

FeatureMatrix RandomFeatures(int64_t n) {
  Rng rng(11);
  FeatureMatrix f;
  f.values.resize(n, 23);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < 23; ++j) f.values(i, j) = rng.Normal();
  }
  return f;
}

Vector RandomQuality(int64_t n) {
  Rng rng(12);
  Vector q(n);
  for (int64_t i = 0; i < n; ++i) q[i] = rng.Uniform(0.5, 2.0);
  return q;
}

// Args: N, budget, dense threshold.
void BM_GreedyMap(benchmark::State& state) {
  const int64_t n = state.range(0);
  const FeatureMatrix f = RandomFeatures(n);
  const DppKernel kernel =
      select::BuildKernel(f, RandomQuality(n), kDefaultBeta, state.range(2));
  for (auto _ : state) {
    benchmark::DoNotOptimize(select::GreedyMap(kernel, state.range(1)));
  }
}
BENCHMARK(BM_GreedyMap)
    ->Args({2000, 100, 4096})
    ->Args({2000, 100, 0})
    ->Args({10000, 500, 0})
    ->Unit(benchmark::kMillisecond);

void BM_BuildDenseKernel(benchmark::State& state) {
  const int64_t n = state.range(0);
  const FeatureMatrix f = RandomFeatures(n);
  const Vector q = RandomQuality(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select::BuildKernel(f, q, kDefaultBeta));
  }
}
BENCHMARK(BM_BuildDenseKernel)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_ExhaustiveMap(benchmark::State& state) {
  const FeatureMatrix f = RandomFeatures(12);
  const DppKernel kernel = select::BuildKernel(f, RandomQuality(12), kDefaultBeta);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select::ExhaustiveMap(kernel, state.range(0)));
  }
}
BENCHMARK(BM_ExhaustiveMap)->Arg(4)->Arg(6);

void BM_Coreset(benchmark::State& state) {
  const FeatureMatrix f = RandomFeatures(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(select::CoresetSelection(f.values, 200));
  }
}
BENCHMARK(BM_Coreset)->Arg(5000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace infoverse
