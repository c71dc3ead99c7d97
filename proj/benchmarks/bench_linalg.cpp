// Copyright 2026 The blockadapt Authors
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

#include "blockadapt/linalg.hpp"
#include "blockadapt/rng.hpp"

namespace {

using namespace blockadapt;

linalg::SymMatrix random_spd(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.normal();
  linalg::SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * a(j, k);
      m.set(i, j, acc);
    }
  return m;
}

void BM_Eigh(benchmark::State& state) {
  const auto m = random_spd(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    auto eig = linalg::eigh(m);
    benchmark::DoNotOptimize(eig.eigvals.data());
  }
}
BENCHMARK(BM_Eigh)->Arg(5)->Arg(10)->Arg(25)->Arg(50);

void BM_InvSqrtShift(benchmark::State& state) {
  const auto m = random_spd(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    auto p = linalg::inv_sqrt_shift(m, 1e-4);
    benchmark::DoNotOptimize(p.dense().data());
  }
}
BENCHMARK(BM_InvSqrtShift)->Arg(5)->Arg(10)->Arg(25);

void BM_SpectralNorm(benchmark::State& state) {
  const auto m = random_spd(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::spectral_norm(m));
}
BENCHMARK(BM_SpectralNorm)->Arg(10)->Arg(25);

}  // namespace
