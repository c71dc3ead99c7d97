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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockadapt/matrix.hpp"
#include "blockadapt/model.hpp"

namespace blockadapt::data {

struct Dataset {
  Matrix X;            // n x p
  std::vector<int> y;  // binary labels or class indices
  std::string name;
  int num_classes = 2;
};

// Minibatch-size schedule: a fixed size M, or M_t = ceil(c * t) capped at
// the dataset size.
struct BatchSchedule {
  enum class Mode { kFixed, kLinear };
  Mode mode = Mode::kFixed;
  std::size_t fixed_m = 128;
  double linear_c = 1.0;

  static BatchSchedule fixed(std::size_t m);
  static BatchSchedule linear(double c);

  std::size_t batch_size(std::uint64_t t, std::size_t n) const;
};

struct ToyProblem {
  Dataset dataset;
  model::ModelParams teacher;
};

// Teacher-network generator: a [2,2,2,1] MLP with standard-normal weights
// and zero biases, 10 standard-normal inputs in R^2, and binary labels
// drawn as Bernoulli(sigmoid(teacher(x))). Deterministic per seed.
ToyProblem gen_toy(std::uint64_t seed);

// IDX readers/writers (big-endian container used for MNIST):
// images carry magic 0x00000803 then (count, rows, cols) and bytes scaled
// to [0,1] by /255; labels carry magic 0x00000801 then count. Counts must
// match between the two files.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writes a dataset back out as (count, 1, p) images with bytes
// round(x * 255) and one label byte per row. Loading the result restores
// a dataset whose values are multiples of 1/255 exactly.
void save_idx(const std::string& images_path, const std::string& labels_path,
              const Dataset& ds);

struct Batch {
  Matrix X;
  std::vector<int> y;
};

// M_t indices drawn uniformly with replacement from a counter-based stream
// keyed by (seed, t); deterministic per key and independent of call order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t m, std::uint64_t t,
                                        std::uint64_t seed);

Batch sample_batch(const Dataset& ds, const BatchSchedule& schedule, std::uint64_t t,
                   std::uint64_t seed);

}  // namespace blockadapt::data
