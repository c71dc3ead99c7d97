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

#include "blockadapt/model.hpp"
#include "blockadapt/rng.hpp"

namespace {

using namespace blockadapt;

void BM_ForwardBackward784(benchmark::State& state) {
  const model::MlpSpec spec{{784, 100, 10}, model::Head::kSoftmaxCe};
  const model::ModelParams params = model::init_params(spec, 1);
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  Rng rng(2);
  Matrix X(batch, 784);
  std::vector<int> y(batch);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < 784; ++j) X(i, j) = rng.uniform01();
    y[i] = static_cast<int>(rng.next_u64() % 10);
  }
  for (auto _ : state) {
    auto fb = model::forward_backward(params, spec, X, y);
    benchmark::DoNotOptimize(fb.grad.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(batch));
}
BENCHMARK(BM_ForwardBackward784)->Arg(32)->Arg(128);

}  // namespace
