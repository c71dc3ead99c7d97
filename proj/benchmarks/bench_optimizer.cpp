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

#include <vector>

#include <benchmark/benchmark.h>

#include "blockadapt/optimizer.hpp"
#include "blockadapt/rng.hpp"

namespace {

using namespace blockadapt;

// Step cost of the block optimizer on d = 2000 as the group size grows.
void BM_BlockStep(benchmark::State& state) {
  const std::size_t d = 2000;
  const std::size_t k = static_cast<std::size_t>(state.range(0));
  optim::BlockOptimizer opt(optim::Design::adam(), grouping::partition_chunk(d, k));
  std::vector<double> x(d, 0.1);
  Rng rng(4);
  std::vector<double> g(d);
  for (auto& v : g) v = rng.normal();
  for (auto _ : state) {
    opt.step(x, g, 0.001);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(d));
}
BENCHMARK(BM_BlockStep)->Arg(1)->Arg(5)->Arg(10)->Arg(25);

void BM_DiagonalStep(benchmark::State& state) {
  const std::size_t d = 2000;
  optim::DiagonalOptimizer opt(optim::Design::adam(), d);
  std::vector<double> x(d, 0.1);
  Rng rng(5);
  std::vector<double> g(d);
  for (auto& v : g) v = rng.normal();
  for (auto _ : state) {
    opt.step(x, g, 0.001);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(d));
}
BENCHMARK(BM_DiagonalStep);

}  // namespace
