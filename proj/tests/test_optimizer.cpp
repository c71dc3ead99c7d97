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

#include "blockadapt/optimizer.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "blockadapt/errors.hpp"
#include "blockadapt/rng.hpp"

namespace blockadapt::optim {
namespace {

std::vector<std::vector<double>> random_stream(std::size_t steps, std::size_t d,
                                               std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> gs(steps, std::vector<double>(d));
  for (auto& g : gs)
    for (auto& v : g) v = rng.normal();
  return gs;
}

TEST(Design, TableConstraints) {
  EXPECT_THROW((Design{Variant::kAdaGrad, 0.5}).validate(), std::invalid_argument);
  EXPECT_THROW((Design{Variant::kRmsProp, 0.1}).validate(), std::invalid_argument);
  EXPECT_NO_THROW(Design::adam().validate());
  Design bad = Design::adam();
  bad.beta2 = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  Design decay = Design::adam();
  decay.decay = {Beta1Decay::Mode::kExponential, 1.5};
  EXPECT_THROW(decay.validate(), std::invalid_argument);
}

TEST(FirstMoment, ZeroBeta1PassesGradientThrough) {
  BlockOptimizer opt(Design::rmsprop(), grouping::partition_chunk(2, 1));
  opt.advance(std::vector<double>{3.0, -1.0});
  EXPECT_DOUBLE_EQ(opt.state().m[0], 3.0);
  EXPECT_DOUBLE_EQ(opt.state().m[1], -1.0);
}

TEST(FirstMoment, BlendFromZeroState) {
  BlockOptimizer opt(Design::adam(), grouping::partition_chunk(2, 2));
  opt.advance(std::vector<double>{2.0, 0.0});
  EXPECT_NEAR(opt.state().m[0], 0.2, 1e-15);
  EXPECT_NEAR(opt.state().m[1], 0.0, 1e-15);
}

TEST(FirstMoment, ExponentialDecaySchedule) {
  Design design = Design::adam();
  design.decay = {Beta1Decay::Mode::kExponential, 0.99};
  EXPECT_NEAR(design.beta1_at(1), 0.9, 1e-15);
  EXPECT_NEAR(design.beta1_at(2), 0.891, 1e-15);

  BlockOptimizer opt(design, grouping::partition_chunk(1, 1));
  std::vector<double> g1 = {2.0};
  std::vector<double> g2 = {1.0};
  opt.advance(g1);
  const double m1 = opt.state().m[0];
  opt.advance(g2);
  EXPECT_NEAR(opt.state().m[0], 0.891 * m1 + (1.0 - 0.891) * 1.0, 1e-15);
}

TEST(Accumulate, AdamScalar) {
  BlockOptimizer opt(Design::adam(), grouping::partition_chunk(1, 1));
  opt.advance(std::vector<double>{2.0});
  EXPECT_NEAR(opt.state().second_moment.blocks[0](0, 0), 0.004, 1e-15);
}

TEST(Accumulate, AdaGradConstantGradientIsFixedPoint) {
  const std::vector<double> g = {1.5, -0.5, 2.0};
  BlockOptimizer opt(Design::adagrad(), grouping::partition_chunk(3, 3));
  std::vector<double> x(3, 0.0);
  for (int t = 0; t < 7; ++t) {
    opt.step(x, g, 0.01);
    const auto& b = opt.state().second_moment.blocks[0];
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        EXPECT_NEAR(b(i, j), g[i] * g[j], 1e-13);
  }
}

TEST(Accumulate, AmsGradKeepsMaximaWhenSpectrumDecays) {
  BlockOptimizer opt(Design::amsgrad(), grouping::partition_chunk(2, 2));
  std::vector<double> x(2, 0.0);
  opt.step(x, std::vector<double>{3.0, 1.0}, 0.01);
  const auto maxima_t1 = opt.state().ams_eigmax[0];
  // Zero gradient decays the raw accumulator, so the stored maxima freeze.
  opt.step(x, std::vector<double>{0.0, 0.0}, 0.01);
  EXPECT_EQ(opt.state().ams_eigmax[0], maxima_t1);
  const linalg::EigDecomp eff = linalg::eigh(opt.effective_second_moment().blocks[0]);
  EXPECT_NEAR(eff.eigvals[0], maxima_t1[0], 1e-12);
  EXPECT_NEAR(eff.eigvals[1], maxima_t1[1], 1e-12);
}

TEST(Accumulate, AmsGradMaximaMonotone) {
  const auto stream = random_stream(30, 4, 11);
  BlockOptimizer opt(Design::amsgrad(), grouping::partition_chunk(4, 2));
  std::vector<double> x(4, 0.0);
  std::vector<std::vector<double>> prev;
  for (const auto& g : stream) {
    opt.step(x, g, 0.01);
    const auto& cur = opt.state().ams_eigmax;
    if (!prev.empty())
      for (std::size_t j = 0; j < cur.size(); ++j)
        for (std::size_t i = 0; i < cur[j].size(); ++i)
          EXPECT_GE(cur[j][i], prev[j][i]);
    prev = cur;
  }
}

TEST(ApplyUpdate, ZeroGradientStreamLeavesParamsFixed) {
  for (const auto& design : {Design::sgd(), Design::adagrad(), Design::adafom(),
                             Design::rmsprop(), Design::adam(), Design::amsgrad()}) {
    BlockOptimizer opt(design, grouping::partition_chunk(3, 2));
    std::vector<double> x = {1.0, -2.0, 0.5};
    const std::vector<double> x0 = x;
    for (int t = 0; t < 5; ++t) opt.step(x, std::vector<double>(3, 0.0), 0.1);
    EXPECT_EQ(x, x0) << variant_name(design.variant);
  }
}

TEST(ApplyUpdate, ScalarAdamStep) {
  BlockOptimizer opt(Design::adam(), grouping::partition_chunk(1, 1));
  std::vector<double> x = {0.0};
  opt.step(x, std::vector<double>{2.0}, 0.1);
  // One step from zero state: m = 0.2, accumulator = 0.004.
  const double expected = 0.1 * 0.2 / (std::sqrt(0.004) + 1e-4);
  EXPECT_NEAR(-x[0], expected, 1e-12);
  EXPECT_NEAR(-x[0], 0.31572855533822636, 1e-12);
}

TEST(ApplyUpdate, SgdSkipsDeltaShift) {
  Design design = Design::sgd();
  design.beta1 = 0.9;
  BlockOptimizer opt(design, grouping::partition_chunk(2, 2));
  std::vector<double> x = {0.0, 0.0};
  opt.step(x, std::vector<double>{1.0, -2.0}, 0.5);
  EXPECT_DOUBLE_EQ(x[0], -0.5 * 0.1 * 1.0);
  EXPECT_DOUBLE_EQ(x[1], 0.5 * 0.1 * 2.0);
}

TEST(DiagonalReference, MatchesBlockAtGroupSizeOne) {
  const std::size_t d = 6;
  const auto stream = random_stream(40, d, 21);
  for (const auto& design : {Design::adagrad(), Design::adafom(), Design::rmsprop(),
                             Design::adam(), Design::amsgrad()}) {
    BlockOptimizer block(design, grouping::partition_chunk(d, 1));
    DiagonalOptimizer diag(design, d);  // epsilon defaults to delta
    std::vector<double> xa(d, 0.5);
    std::vector<double> xb(d, 0.5);
    for (const auto& g : stream) {
      block.step(xa, g, 0.05);
      diag.step(xb, g, 0.05);
      for (std::size_t i = 0; i < d; ++i)
        EXPECT_NEAR(xa[i], xb[i], 1e-9) << variant_name(design.variant);
    }
  }
}

TEST(DiagonalReference, AdaGradConstantGradient) {
  DiagonalOptimizer diag(Design::adagrad(), 2);
  std::vector<double> x(2, 0.0);
  const std::vector<double> g = {3.0, -1.0};
  for (int t = 0; t < 5; ++t) {
    diag.step(x, g, 0.01);
    EXPECT_NEAR(diag.v_hat()[0], 9.0, 1e-13);
    EXPECT_NEAR(diag.v_hat()[1], 1.0, 1e-13);
  }
}

TEST(DiagonalReference, AmsGradMonotoneVhat) {
  DiagonalOptimizer diag(Design::amsgrad(), 3);
  std::vector<double> x(3, 0.0);
  const auto stream = random_stream(25, 3, 31);
  std::vector<double> prev(3, 0.0);
  for (const auto& g : stream) {
    diag.step(x, g, 0.01);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_GE(diag.v_hat()[i], prev[i]);
      EXPECT_GE(diag.v_hat()[i], diag.v_raw()[i]);
    }
    prev.assign(diag.v_hat().begin(), diag.v_hat().end());
  }
}

TEST(DenseReference, OneStepAdaGradRankOne) {
  DenseOptimizer dense(Design::adagrad(), 2);
  std::vector<double> x = {0.0, 0.0};
  dense.step(x, std::vector<double>{3.0, 4.0}, 0.1);
  // First-step accumulator is g gT; the update collapses to alpha*g/(|g|+delta).
  EXPECT_NEAR(-x[0], 0.1 * 3.0 / (5.0 + 1e-4), 1e-10);
  EXPECT_NEAR(-x[1], 0.1 * 4.0 / (5.0 + 1e-4), 1e-10);
}

TEST(DenseReference, MatchesBlockAtFullPartition) {
  const std::size_t d = 10;
  const auto stream = random_stream(50, d, 41);
  for (const auto& design : {Design::adam(), Design::adagrad(), Design::amsgrad()}) {
    BlockOptimizer block(design, grouping::partition_chunk(d, d));
    DenseOptimizer dense(design, d);
    std::vector<double> xa(d, 0.1);
    std::vector<double> xb(d, 0.1);
    for (const auto& g : stream) {
      block.step(xa, g, 0.05);
      dense.step(xb, g, 0.05);
      for (std::size_t i = 0; i < d; ++i)
        EXPECT_NEAR(xa[i], xb[i], 1e-8) << variant_name(design.variant);
    }
  }
}

TEST(DenseReference, RejectsLargeDimension) {
  EXPECT_THROW(DenseOptimizer(Design::adam(), 65), std::invalid_argument);
}

TEST(Step, Deterministic) {
  const auto stream = random_stream(10, 4, 51);
  auto run = [&] {
    BlockOptimizer opt(Design::adam(), grouping::partition_chunk(4, 2));
    std::vector<double> x(4, 1.0);
    for (const auto& g : stream) opt.step(x, g, 0.05);
    return x;
  };
  EXPECT_EQ(run(), run());
}

TEST(Step, ScalarQuadraticConverges) {
  BlockOptimizer opt(Design::adam(), grouping::partition_chunk(1, 1));
  std::vector<double> x = {3.0};
  for (int t = 0; t < 1000; ++t) opt.step(x, std::vector<double>{x[0]}, 0.01);
  EXPECT_LT(std::abs(x[0]), 3.0);
  EXPECT_LT(std::abs(x[0]), 0.1);
}

TEST(Step, StateSizeMatchesBlockQuadratics) {
  const grouping::Partition p = grouping::partition_chunk(20, 5);
  BlockOptimizer opt(Design::adam(), p);
  // 4 blocks of 5x5 plus the first moment.
  EXPECT_EQ(opt.state().value_count(), 4u * 25u + 20u);
}

TEST(Step, BlocksStayPsd) {
  const auto stream = random_stream(30, 6, 61);
  BlockOptimizer opt(Design::adam(), grouping::partition_chunk(6, 3));
  std::vector<double> x(6, 0.0);
  for (const auto& g : stream) {
    opt.step(x, g, 0.05);
    for (const auto& b : opt.state().second_moment.blocks) {
      const auto eig = linalg::eigh(b);
      for (double lam : eig.eigvals)
        EXPECT_GE(lam, -linalg::kPsdTol * std::max(b.max_abs(), 1.0));
    }
  }
}

TEST(Step, PermutationEquivariantWithinBlock) {
  // Swapping two coordinates of the same block and permuting the gradient
  // stream identically permutes the trajectory.
  const std::size_t d = 5;
  const auto stream = random_stream(15, d, 71);
  const std::size_t perm[] = {1, 0, 2, 3, 4};  // swap inside block {0,1,2}

  BlockOptimizer a(Design::adam(), grouping::partition_chunk(d, 3));
  BlockOptimizer b(Design::adam(), grouping::partition_chunk(d, 3));
  std::vector<double> xa = {0.1, -0.2, 0.3, 0.4, -0.5};
  std::vector<double> xb(d);
  for (std::size_t i = 0; i < d; ++i) xb[i] = xa[perm[i]];
  for (const auto& g : stream) {
    std::vector<double> gp(d);
    for (std::size_t i = 0; i < d; ++i) gp[i] = g[perm[i]];
    a.step(xa, g, 0.05);
    b.step(xb, gp, 0.05);
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(xb[i], xa[perm[i]], 1e-9);
  }
}

TEST(Step, BlockIndependence) {
  // The first block's state never sees the second block's gradients.
  const std::size_t d = 4;
  const auto stream = random_stream(12, d, 81);
  BlockOptimizer a(Design::adam(), grouping::partition_chunk(d, 2));
  BlockOptimizer b(Design::adam(), grouping::partition_chunk(d, 2));
  std::vector<double> xa(d, 0.0);
  std::vector<double> xb(d, 0.0);
  for (const auto& g : stream) {
    std::vector<double> zeroed = g;
    zeroed[2] = 0.0;
    zeroed[3] = 0.0;
    a.step(xa, g, 0.05);
    b.step(xb, zeroed, 0.05);
    const auto& ba = a.state().second_moment.blocks[0];
    const auto& bb = b.state().second_moment.blocks[0];
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(ba(i, j), bb(i, j));
    EXPECT_EQ(xa[0], xb[0]);
    EXPECT_EQ(xa[1], xb[1]);
  }
}

TEST(Step, ThreadCountDoesNotChangeResults) {
  const std::size_t d = 30;
  const auto stream = random_stream(10, d, 91);
  auto run = [&](int threads) {
    BlockOptimizer opt(Design::adam(), grouping::partition_chunk(d, 7));
    opt.set_threads(threads);
    std::vector<double> x(d, 0.2);
    for (const auto& g : stream) opt.step(x, g, 0.05);
    return x;
  };
  EXPECT_EQ(run(1), run(3));
}

TEST(Step, RejectsNonFiniteGradientNamingTensor) {
  const grouping::TensorLayout layout =
      grouping::TensorLayout::from_shapes({{"W1", {2, 2}}, {"b1", {2}}});
  BlockOptimizer opt(Design::adam(), grouping::partition_chunk(6, 2), &layout);
  std::vector<double> x(6, 0.0);
  std::vector<double> g(6, 0.0);
  g[5] = std::numeric_limits<double>::infinity();
  try {
    opt.step(x, g, 0.1);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("b1"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, RoundTripsBitExactly) {
  const std::size_t d = 7;
  const auto stream = random_stream(9, d, 101);
  const auto path = std::filesystem::temp_directory_path() / "blockadapt-ckpt-test.bin";

  for (const auto& design : {Design::adam(), Design::amsgrad()}) {
    BlockOptimizer opt(design, grouping::partition_chunk(d, 3));
    std::vector<double> x(d, 0.3);
    for (const auto& g : stream) opt.step(x, g, 0.05);
    save_checkpoint(path, opt, x);

    BlockOptimizer restored(design, grouping::partition_chunk(d, 3));
    std::vector<double> xr(d, 0.0);
    EXPECT_EQ(load_checkpoint(path, restored, xr), opt.state().t);
    EXPECT_EQ(xr, x);
    EXPECT_EQ(restored.state().m, opt.state().m);
    EXPECT_EQ(restored.state().ams_eigmax, opt.state().ams_eigmax);
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_EQ(restored.state().second_moment.blocks[j].dense(),
                opt.state().second_moment.blocks[j].dense());

    // Continued trajectories must agree bit for bit.
    std::vector<double> xc = x;
    const auto more = random_stream(5, d, 111);
    for (const auto& g : more) {
      opt.step(xc, g, 0.05);
      restored.step(xr, g, 0.05);
    }
    EXPECT_EQ(xc, xr);
  }
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsMismatchedPartition) {
  const auto path = std::filesystem::temp_directory_path() / "blockadapt-ckpt-mismatch.bin";
  BlockOptimizer opt(Design::adam(), grouping::partition_chunk(6, 3));
  std::vector<double> x(6, 0.0);
  save_checkpoint(path, opt, x);
  BlockOptimizer other(Design::adam(), grouping::partition_chunk(6, 2));
  EXPECT_THROW(load_checkpoint(path, other, x), DataError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsBadMagic) {
  const auto path = std::filesystem::temp_directory_path() / "blockadapt-ckpt-magic.bin";
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOTACKPT1 some trailing bytes";
  }
  BlockOptimizer opt(Design::adam(), grouping::partition_chunk(2, 1));
  std::vector<double> x(2, 0.0);
  EXPECT_THROW(load_checkpoint(path, opt, x), DataError);
  std::filesystem::remove(path);
}

TEST(Checkpoint, DiagonalStateRoundTrip) {
  DiagonalOptimizer diag(Design::amsgrad(), 4);
  std::vector<double> x(4, 0.7);
  const auto stream = random_stream(6, 4, 121);
  for (const auto& g : stream) diag.step(x, g, 0.05);
  const auto path = std::filesystem::temp_directory_path() / "blockadapt-ckpt-diag.bin";
  save_checkpoint(path, diag, x);

  DiagonalOptimizer restored(Design::amsgrad(), 4);
  std::vector<double> xr(4, 0.0);
  EXPECT_EQ(load_checkpoint(path, restored, xr), diag.t());
  EXPECT_EQ(xr, x);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(restored.v_hat()[i], diag.v_hat()[i]);
    EXPECT_EQ(restored.v_raw()[i], diag.v_raw()[i]);
    EXPECT_EQ(restored.m()[i], diag.m()[i]);
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace blockadapt::optim
