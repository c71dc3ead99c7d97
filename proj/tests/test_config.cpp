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

#include "blockadapt/config.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "blockadapt/errors.hpp"

namespace blockadapt::cli {
namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseConfig, HappyPathWithComments) {
  const RunConfig cfg = parse_config_text(
      "# experiment\n"
      "dataset = toy\n"
      "design = amsgrad   # trailing comment\n"
      "beta1 = 0.8\n"
      "partition = chunk\n"
      "block_size = 5\n"
      "alpha = 0.01\n"
      "lr = inv_sqrt\n"
      "batch = linear\n"
      "batch_c = 0.5\n"
      "steps = 100\n"
      "seed = 9\n",
      "test.cfg");
  EXPECT_EQ(cfg.design.variant, optim::Variant::kAmsGrad);
  EXPECT_DOUBLE_EQ(cfg.design.beta1, 0.8);
  EXPECT_EQ(cfg.partition, RunConfig::PartitionKind::kChunk);
  EXPECT_EQ(cfg.block_size, 5u);
  EXPECT_EQ(cfg.lr, RunConfig::LrKind::kInvSqrt);
  EXPECT_EQ(cfg.batch.mode, data::BatchSchedule::Mode::kLinear);
  EXPECT_EQ(cfg.steps, 100u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.head, model::Head::kSigmoidBce);  // from trailing width 1
  EXPECT_DOUBLE_EQ(cfg.epsilon, cfg.design.delta);
}

TEST(ParseConfig, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("dataset = toy\nalpha\n").find("test.cfg:2"), std::string::npos);
  EXPECT_NE(error_of("alpha = fast\nsteps = 1\n").find("test.cfg:1"), std::string::npos);
  EXPECT_NE(error_of("alpha = 0.1\nalpha = 0.2\nsteps = 1\n").find("duplicate"),
            std::string::npos);
  EXPECT_NE(error_of("alpha = 0.1\nsteps = 1\nwat = 1\n").find("unknown key"),
            std::string::npos);
  EXPECT_NE(error_of("steps = 1\n").find("alpha"), std::string::npos);
}

TEST(ParseConfig, StepsXorEpochs) {
  EXPECT_NE(error_of("alpha = 0.1\n").find("steps/epochs"), std::string::npos);
  EXPECT_NE(error_of("alpha = 0.1\nsteps = 1\nepochs = 1\n").find("steps/epochs"),
            std::string::npos);
  EXPECT_NE(
      error_of("alpha = 0.1\nepochs = 1\nbatch = linear\nbatch_c = 1\n").find("fixed"),
      std::string::npos);
  EXPECT_NO_THROW(parse_config_text("alpha = 0.1\nsteps = 0\n", "t"));
}

TEST(ParseConfig, DesignTableEnforced) {
  EXPECT_NE(error_of("design = adagrad\nbeta1 = 0.9\nalpha = 0.1\nsteps = 1\n")
                .find("beta1"),
            std::string::npos);
  EXPECT_NE(error_of("design = rmsprop\nbeta1 = 0.5\nalpha = 0.1\nsteps = 1\n")
                .find("beta1"),
            std::string::npos);
  // AdaFom keeps its first moment.
  EXPECT_NO_THROW(parse_config_text(
      "design = adafom\nbeta1 = 0.9\nalpha = 0.1\nsteps = 1\n", "t"));
}

TEST(ParseConfig, ClipRequiresBlockPartition) {
  const std::string base =
      "alpha = 0.1\nsteps = 1\nclip = on\nclip_gamma = 1e-3\nclip_alpha_star = 0.1\n";
  EXPECT_NE(error_of(base).find("block"), std::string::npos);  // default diag
  EXPECT_NO_THROW(parse_config_text(base + "partition = chunk\nblock_size = 2\n", "t"));
  EXPECT_NE(error_of("alpha = 0.1\nsteps = 1\nclip = on\npartition = full\n")
                .find("clip"),
            std::string::npos);
}

TEST(ParseConfig, MnistNeedsPaths) {
  EXPECT_NE(error_of("dataset = mnist\nalpha = 0.1\nsteps = 1\n").find("mnist"),
            std::string::npos);
}

TEST(ParseConfig, ExponentialDecayNeedsLambda) {
  EXPECT_NE(error_of("beta1_decay = exponential\nalpha = 0.1\nsteps = 1\n")
                .find("beta1_lambda"),
            std::string::npos);
  const RunConfig cfg = parse_config_text(
      "beta1_decay = exponential\nbeta1_lambda = 0.99\nalpha = 0.1\nsteps = 1\n", "t");
  EXPECT_EQ(cfg.design.decay.mode, optim::Beta1Decay::Mode::kExponential);
  EXPECT_DOUBLE_EQ(cfg.design.decay.lambda, 0.99);
}

TEST(AlphaAt, Schedules) {
  RunConfig cfg = parse_config_text("alpha = 0.1\nsteps = 1\n", "t");
  EXPECT_DOUBLE_EQ(cfg.alpha_at(1), 0.1);
  EXPECT_DOUBLE_EQ(cfg.alpha_at(100), 0.1);

  cfg.lr = RunConfig::LrKind::kInvSqrt;
  EXPECT_DOUBLE_EQ(cfg.alpha_at(1), 0.1);
  EXPECT_DOUBLE_EQ(cfg.alpha_at(4), 0.05);

  cfg.lr = RunConfig::LrKind::kStepDecay;
  cfg.lr_milestones = {10, 20};
  cfg.lr_factor = 0.5;
  EXPECT_DOUBLE_EQ(cfg.alpha_at(9), 0.1);
  EXPECT_DOUBLE_EQ(cfg.alpha_at(10), 0.05);
  EXPECT_DOUBLE_EQ(cfg.alpha_at(25), 0.025);
}

TEST(Echo, CoversResolvedSettings) {
  const RunConfig cfg = parse_config_text(
      "design = adam\npartition = input_neuron\nblock_size = 10\nalpha = 0.001\n"
      "epochs = 1\ndataset = mnist\nmnist_images = /x/i\nmnist_labels = /x/l\n",
      "t");
  const auto kv = cfg.echo();
  auto find = [&](const std::string& key) {
    for (const auto& [k, v] : kv)
      if (k == key) return v;
    return std::string();
  };
  EXPECT_EQ(find("dataset"), "mnist");
  EXPECT_EQ(find("model"), "784,100,10");
  EXPECT_EQ(find("partition"), "input_neuron");
  EXPECT_EQ(find("block_size"), "10");
  EXPECT_EQ(find("epochs"), "1");
  EXPECT_EQ(find("head"), "softmax_ce");
}

TEST(ParseConfig, MissingFileIsConfigError) {
  EXPECT_THROW(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

}  // namespace
}  // namespace blockadapt::cli
