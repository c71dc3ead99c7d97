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
#include <functional>
#include <span>
#include <vector>

#include "blockadapt/grouping.hpp"
#include "blockadapt/matrix.hpp"

namespace blockadapt::model {

enum class Head { kSigmoidBce, kSoftmaxCe };

// Fully-connected network description: layer widths [w0, ..., wL], ReLU
// hidden activations, and either a sigmoid/BCE head (last width 1, binary
// labels) or a softmax/cross-entropy head (class-index labels).
struct MlpSpec {
  std::vector<std::size_t> widths;
  Head head = Head::kSigmoidBce;

  void validate() const;
  std::size_t param_count() const;
  std::size_t num_classes() const;
  // Tensors W1 (w1 x w0), b1, W2, b2, ... in flat row-major order.
  grouping::TensorLayout layout() const;
};

// Flat parameter vector with tensor metadata.
struct ModelParams {
  grouping::TensorLayout layout;
  std::vector<double> values;
};

// Uniform(-a, a) weights with a = sqrt(6 / (fan_in + fan_out)), zero
// biases; deterministic per seed.
ModelParams init_params(const MlpSpec& spec, std::uint64_t seed);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Mean loss over the batch and its exact gradient. X is (batch, w0)
// row-major; y holds binary labels or class indices per the head.
LossGrad forward_backward(const ModelParams& params, const MlpSpec& spec,
                          const Matrix& X, std::span<const int> y);

// Loss only; the forward-only path behind the finite-difference check.
double forward_loss(const ModelParams& params, const MlpSpec& spec, const Matrix& X,
                    std::span<const int> y);

// Per-example head probabilities: sigmoid head gives one column, softmax
// head gives num_classes columns.
Matrix predict_probs(const ModelParams& params, const MlpSpec& spec, const Matrix& X);

// Fraction of correct predictions; argmax for softmax (ties toward the
// lower class index), threshold 0.5 for sigmoid.
double eval_accuracy(const ModelParams& params, const MlpSpec& spec, const Matrix& X,
                     std::span<const int> y);

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t probes = 0;
  bool pass = false;
};

inline constexpr double kGradCheckTol = 1e-5;
inline constexpr double kGradCheckStep = 1e-5;

// Central finite differences against the analytic gradient on a seeded
// random batch. Checks every parameter when param_count <= max_probes,
// otherwise a seeded sample. corrupt, when set, perturbs the analytic
// gradient before the comparison (negative-control hook for tests).
GradCheckReport gradient_check(
    const MlpSpec& spec, std::uint64_t seed, std::size_t max_probes = 200,
    const std::function<void(std::vector<double>&)>& corrupt = {});

}  // namespace blockadapt::model
