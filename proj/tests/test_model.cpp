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

#include "blockadapt/model.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "blockadapt/rng.hpp"

namespace blockadapt::model {
namespace {

TEST(MlpSpec, ParamCountAndLayout) {
  const MlpSpec spec{{2, 2, 2, 1}, Head::kSigmoidBce};
  EXPECT_EQ(spec.param_count(), 15u);  // (2*2+2) + (2*2+2) + (2*1+1)
  const auto layout = spec.layout();
  EXPECT_EQ(layout.total(), 15u);
  EXPECT_EQ(layout.tensors().size(), 6u);
  EXPECT_EQ(layout.tensors()[0].name, "W1");
  EXPECT_EQ(layout.tensors()[5].name, "b3");
}

TEST(MlpSpec, Validation) {
  EXPECT_THROW((MlpSpec{{3}, Head::kSoftmaxCe}).validate(), std::invalid_argument);
  EXPECT_THROW((MlpSpec{{3, 0, 2}, Head::kSoftmaxCe}).validate(), std::invalid_argument);
  EXPECT_THROW((MlpSpec{{3, 2}, Head::kSigmoidBce}).validate(), std::invalid_argument);
  EXPECT_NO_THROW((MlpSpec{{3, 1}, Head::kSigmoidBce}).validate());
}

TEST(InitParams, DeterministicPerSeed) {
  const MlpSpec spec{{2, 2, 2, 1}, Head::kSigmoidBce};
  const ModelParams a = init_params(spec, 5);
  const ModelParams b = init_params(spec, 5);
  const ModelParams c = init_params(spec, 6);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
}

TEST(InitParams, BiasesZeroWeightsBounded) {
  const MlpSpec spec{{4, 3, 2}, Head::kSoftmaxCe};
  const ModelParams p = init_params(spec, 1);
  for (const auto& tensor : p.layout.tensors()) {
    if (tensor.shape.size() == 1) {
      for (std::size_t k = 0; k < tensor.size(); ++k)
        EXPECT_EQ(p.values[tensor.offset + k], 0.0);
    } else {
      const double bound =
          std::sqrt(6.0 / static_cast<double>(tensor.shape[0] + tensor.shape[1]));
      for (std::size_t k = 0; k < tensor.size(); ++k)
        EXPECT_LE(std::abs(p.values[tensor.offset + k]), bound);
    }
  }
}

TEST(ForwardBackward, ZeroWeightsBceIsLogTwo) {
  const MlpSpec spec{{2, 2, 2, 1}, Head::kSigmoidBce};
  ModelParams params{spec.layout(), std::vector<double>(spec.param_count(), 0.0)};
  Matrix X(3, 2);
  X(0, 0) = 1.0;
  X(1, 1) = -2.0;
  X(2, 0) = 0.5;
  const std::vector<int> y = {1, 1, 1};
  const auto fb = forward_backward(params, spec, X, y);
  EXPECT_NEAR(fb.loss, std::log(2.0), 1e-12);
}

TEST(ForwardBackward, UniformSoftmaxLossIsLogClasses) {
  const MlpSpec spec{{3, 4, 5}, Head::kSoftmaxCe};
  ModelParams params{spec.layout(), std::vector<double>(spec.param_count(), 0.0)};
  Matrix X(2, 3);
  X(0, 0) = 0.3;
  X(1, 2) = -0.7;
  const std::vector<int> y = {0, 4};
  EXPECT_NEAR(forward_loss(params, spec, X, y), std::log(5.0), 1e-12);
}

TEST(ForwardBackward, DuplicatedBatchKeepsMean) {
  const MlpSpec spec{{2, 3, 2}, Head::kSoftmaxCe};
  const ModelParams params = init_params(spec, 2);
  Rng rng(3);
  Matrix X(4, 2);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) X(i, j) = rng.normal();
  const std::vector<int> y = {0, 1, 1, 0};

  Matrix XX(8, 2);
  std::vector<int> yy(8);
  for (std::size_t i = 0; i < 8; ++i) {
    for (std::size_t j = 0; j < 2; ++j) XX(i, j) = X(i % 4, j);
    yy[i] = y[i % 4];
  }
  const auto once = forward_backward(params, spec, X, y);
  const auto twice = forward_backward(params, spec, XX, yy);
  EXPECT_NEAR(once.loss, twice.loss, 1e-13);
  for (std::size_t i = 0; i < once.grad.size(); ++i)
    EXPECT_NEAR(once.grad[i], twice.grad[i], 1e-13);
}

TEST(ForwardBackward, BatchOrderInvariantLoss) {
  const MlpSpec spec{{2, 3, 2}, Head::kSoftmaxCe};
  const ModelParams params = init_params(spec, 4);
  Rng rng(5);
  Matrix X(5, 2);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 2; ++j) X(i, j) = rng.normal();
  const std::vector<int> y = {0, 1, 0, 1, 1};

  Matrix Xr(5, 2);
  std::vector<int> yr(5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 2; ++j) Xr(i, j) = X(4 - i, j);
    yr[i] = y[4 - i];
  }
  EXPECT_NEAR(forward_loss(params, spec, X, y), forward_loss(params, spec, Xr, yr),
              1e-12);
}

TEST(ForwardBackward, DimensionMismatchRejected) {
  const MlpSpec spec{{2, 2, 1}, Head::kSigmoidBce};
  const ModelParams params = init_params(spec, 1);
  Matrix X(2, 3);
  EXPECT_THROW(forward_backward(params, spec, X, std::vector<int>{0, 1}),
               std::invalid_argument);
  Matrix X2(2, 2);
  EXPECT_THROW(forward_backward(params, spec, X2, std::vector<int>{0}),
               std::invalid_argument);
  EXPECT_THROW(forward_backward(params, spec, X2, std::vector<int>{0, 2}),
               std::invalid_argument);
}

TEST(GradientCheck, SmallNetworkAllParams) {
  const auto report = gradient_check({{2, 2, 2, 1}, Head::kSigmoidBce}, 3);
  EXPECT_EQ(report.probes, 15u);
  EXPECT_TRUE(report.pass) << "max rel err " << report.max_rel_error;
  EXPECT_LT(report.max_rel_error, kGradCheckTol);
}

TEST(GradientCheck, HiddenWidthsAndHeads) {
  for (std::size_t h : {1u, 2u, 5u}) {
    const auto sig =
        gradient_check({{2, h, 1}, Head::kSigmoidBce}, 9);
    EXPECT_TRUE(sig.pass) << "sigmoid width " << h << ": " << sig.max_rel_error;
    const auto soft =
        gradient_check({{2, h, 3}, Head::kSoftmaxCe}, 9);
    EXPECT_TRUE(soft.pass) << "softmax width " << h << ": " << soft.max_rel_error;
  }
}

TEST(GradientCheck, CorruptedGradientFails) {
  const auto report = gradient_check(
      {{2, 2, 2, 1}, Head::kSigmoidBce}, 3, 200,
      [](std::vector<double>& grad) { grad[4] += 1e-2; });
  EXPECT_FALSE(report.pass);
}

TEST(EvalAccuracy, PerfectAndConstantPredictors) {
  // One weight, one bias: logit = w*x + b.
  const MlpSpec spec{{1, 1}, Head::kSigmoidBce};
  ModelParams params{spec.layout(), {5.0, 0.0}};  // strong slope through 0
  Matrix X(4, 1);
  X(0, 0) = -2.0;
  X(1, 0) = -1.0;
  X(2, 0) = 1.0;
  X(3, 0) = 2.0;
  const std::vector<int> y = {0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(eval_accuracy(params, spec, X, y), 1.0);

  ModelParams constant{spec.layout(), {0.0, 0.0}};  // sigmoid(0) = 0.5 -> class 0
  EXPECT_DOUBLE_EQ(eval_accuracy(constant, spec, X, y), 0.5);
}

TEST(EvalAccuracy, SoftmaxFixtureTwoOfThree) {
  // Identity-ish logits: class scores equal the inputs.
  const MlpSpec spec{{3, 3}, Head::kSoftmaxCe};
  ModelParams params{spec.layout(), std::vector<double>(spec.param_count(), 0.0)};
  // W = I3, b = 0.
  params.values[0] = 1.0;
  params.values[4] = 1.0;
  params.values[8] = 1.0;
  Matrix X(3, 3);
  X(0, 0) = 3.0;            // predicts 0, label 0: correct
  X(1, 1) = 2.0;            // predicts 1, label 1: correct
  X(2, 2) = 1.0;            // predicts 2, label 0: wrong
  const std::vector<int> y = {0, 1, 0};
  EXPECT_NEAR(eval_accuracy(params, spec, X, y), 2.0 / 3.0, 1e-15);
}

TEST(EvalAccuracy, TiesPickLowerClass) {
  const MlpSpec spec{{2, 2}, Head::kSoftmaxCe};
  ModelParams params{spec.layout(), std::vector<double>(spec.param_count(), 0.0)};
  Matrix X(1, 2);
  X(0, 0) = 1.0;
  // All-zero weights give identical logits; the tie resolves to class 0.
  EXPECT_DOUBLE_EQ(eval_accuracy(params, spec, X, std::vector<int>{0}), 1.0);
  EXPECT_DOUBLE_EQ(eval_accuracy(params, spec, X, std::vector<int>{1}), 0.0);
}

TEST(EvalAccuracy, EmptyBatchRejected) {
  const MlpSpec spec{{2, 2}, Head::kSoftmaxCe};
  const ModelParams params = init_params(spec, 1);
  Matrix X(0, 2);
  EXPECT_THROW(eval_accuracy(params, spec, X, std::vector<int>{}),
               std::invalid_argument);
}

TEST(Loss, NonNegativeForBothHeads) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const MlpSpec spec{{2, 3, trial % 2 == 0 ? std::size_t{1} : std::size_t{4}},
                       trial % 2 == 0 ? Head::kSigmoidBce : Head::kSoftmaxCe};
    const ModelParams params = init_params(spec, static_cast<std::uint64_t>(trial));
    Matrix X(3, 2);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j) X(i, j) = rng.normal();
    std::vector<int> y(3);
    for (auto& label : y)
      label = static_cast<int>(rng.next_u64() % spec.num_classes());
    EXPECT_GE(forward_loss(params, spec, X, y), 0.0);
  }
}

}  // namespace
}  // namespace blockadapt::model
