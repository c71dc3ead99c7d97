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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blockadapt/clipping.hpp"
#include "blockadapt/grouping.hpp"
#include "blockadapt/linalg.hpp"

namespace blockadapt::optim {

enum class Variant { kSgd, kAdaGrad, kAdaFom, kRmsProp, kAdam, kAmsGrad };

const char* variant_name(Variant v);

// How the first-moment decay evolves over steps.
struct Beta1Decay {
  enum class Mode { kConstant, kExponential };
  Mode mode = Mode::kConstant;
  double lambda = 1.0;  // exponential: beta1_t = beta1 * lambda^(t-1)
};

// Update-rule selector plus its decay and shift constants.
//
// AdaGrad and RMSprop run without first-moment averaging (beta1 = 0);
// AdaFom, Adam and AMSGrad blend the gradient with decay beta1. The
// accumulator recurrences per variant:
//
//   AdaGrad/AdaFom  running mean   ((t-1) V + g gᵀ) / t
//   RMSprop/Adam    EMA            beta2 V + (1 - beta2) g gᵀ
//   AMSGrad         EMA plus a running entrywise max of the sorted spectrum
//   SGD             accumulator unused; the step is x -= alpha * m exactly
struct Design {
  Variant variant = Variant::kAdam;
  double beta1 = 0.9;
  Beta1Decay decay{};
  double beta2 = 0.999;
  double delta = 1e-4;

  // Throws std::invalid_argument on out-of-range constants or a nonzero
  // beta1 for the variants that forbid it.
  void validate() const;

  double beta1_at(std::uint64_t t) const;
  bool uses_second_moment() const { return variant != Variant::kSgd; }
  bool uses_first_moment_blend() const {
    return variant != Variant::kAdaGrad && variant != Variant::kRmsProp;
  }

  static Design sgd(double delta = 1e-4);
  static Design adagrad(double delta = 1e-4);
  static Design adafom(double beta1 = 0.9, double delta = 1e-4);
  static Design rmsprop(double beta2 = 0.999, double delta = 1e-4);
  static Design adam(double beta1 = 0.9, double beta2 = 0.999, double delta = 1e-4);
  static Design amsgrad(double beta1 = 0.9, double beta2 = 0.999, double delta = 1e-4);
};

// Symmetric PSD blocks aligned to a partition.
struct BlockDiagMatrix {
  grouping::Partition partition;
  std::vector<linalg::SymMatrix> blocks;

  static BlockDiagMatrix zeros(const grouping::Partition& p);
};

struct OptimizerState {
  std::uint64_t t = 0;
  std::vector<double> m;            // first moment, length d
  BlockDiagMatrix second_moment;    // raw accumulator (EMA/mean per design)
  // AMSGrad only: per-block running max of the sorted accumulator spectrum.
  std::vector<std::vector<double>> ams_eigmax;

  // Stored doubles: accumulator entries plus the first moment.
  std::size_t value_count() const;
};

// One optimizer instance owns one trajectory. Within a step the per-block
// work is independent and may be spread across threads; results are
// identical for any thread count.
class BlockOptimizer {
 public:
  BlockOptimizer(Design design, grouping::Partition partition,
                 const grouping::TensorLayout* layout = nullptr);

  const Design& design() const { return design_; }
  const grouping::Partition& partition() const { return partition_; }
  const OptimizerState& state() const { return state_; }

  void set_threads(int threads);

  // Advances t and updates the first moment and the block accumulator in
  // that order. Throws NumericalError on non-finite gradient entries,
  // naming the owning tensor when a layout was provided.
  void advance(std::span<const double> g);

  // x -= (preconditioner) m, blockwise. With bounds, the preconditioner
  // spectrum alpha/(sqrt(lambda)+delta) is projected into the interval
  // first. For SGD the step is x -= alpha * m (no delta shift); bounds
  // then clamp alpha itself. applied_spectrum, when non-null, receives the
  // per-block spectrum actually applied.
  void apply_update(std::span<double> x, double alpha,
                    const clipping::ClipBounds* bounds = nullptr,
                    std::vector<std::vector<double>>* applied_spectrum = nullptr);

  // advance + apply_update (the algorithm's step order: m, accumulator, x).
  void step(std::span<double> x, std::span<const double> g, double alpha,
            const clipping::ClipBounds* bounds = nullptr,
            std::vector<std::vector<double>>* applied_spectrum = nullptr);

  // The accumulator the update actually preconditions with: the raw blocks
  // for most designs, the spectrum-maxed reconstruction for AMSGrad.
  BlockDiagMatrix effective_second_moment() const;

  // Restores a serialized state (used by checkpoint loading).
  void restore(OptimizerState state);

 private:
  Design design_;
  grouping::Partition partition_;
  const grouping::TensorLayout* layout_;
  OptimizerState state_;
  int threads_ = 1;
  // AMSGrad: decomposition of the effective accumulator for the current t.
  std::vector<linalg::EigDecomp> effective_eig_;
};

// Elementwise reference: the diagonal counterpart of every design, with
// update x -= alpha * m / (sqrt(v_hat) + eps). Used as the equivalence
// oracle for group size 1 and as the "diag" engine of the CLI.
class DiagonalOptimizer {
 public:
  DiagonalOptimizer(Design design, std::size_t dim,
                    std::optional<double> epsilon = std::nullopt);

  const Design& design() const { return design_; }
  double epsilon() const { return epsilon_; }
  std::uint64_t t() const { return t_; }
  std::span<const double> m() const { return m_; }
  // Effective second moment: max-buffer for AMSGrad, the accumulator otherwise.
  std::span<const double> v_hat() const;

  void advance(std::span<const double> g);
  void apply_update(std::span<double> x, double alpha);
  void step(std::span<double> x, std::span<const double> g, double alpha);

  void restore(std::uint64_t t, std::vector<double> m, std::vector<double> v,
               std::vector<double> v_ams);
  std::span<const double> v_raw() const { return v_; }

 private:
  Design design_;
  double epsilon_;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
  std::vector<double> v_ams_;  // AMSGrad max buffer
};

// Dense full-matrix reference with a single d x d accumulator; oracle for
// the r = 1 partition. Guarded to small d.
class DenseOptimizer {
 public:
  static constexpr std::size_t kMaxDim = 64;

  DenseOptimizer(Design design, std::size_t dim);

  std::uint64_t t() const { return t_; }
  std::span<const double> m() const { return m_; }
  const linalg::SymMatrix& accumulator() const { return v_; }

  void step(std::span<double> x, std::span<const double> g, double alpha);

 private:
  Design design_;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  linalg::SymMatrix v_;
  std::vector<double> ams_eigmax_;
};

// Versioned binary checkpoint: magic "BLKADAPT1", then little-endian
// 64-bit counts and doubles covering step counter, partition, first
// moment, accumulator blocks, AMSGrad maxima and the parameter vector.
inline constexpr char kCheckpointMagic[] = "BLKADAPT1";

void save_checkpoint(const std::filesystem::path& path, const BlockOptimizer& opt,
                     std::span<const double> x);
void save_checkpoint(const std::filesystem::path& path, const DiagonalOptimizer& opt,
                     std::span<const double> x);

// Restores state into an optimizer built with a matching partition/design.
// Returns the restored step counter. Throws DataError on format or shape
// mismatch.
std::uint64_t load_checkpoint(const std::filesystem::path& path, BlockOptimizer& opt,
                              std::span<double> x);
std::uint64_t load_checkpoint(const std::filesystem::path& path,
                              DiagonalOptimizer& opt, std::span<double> x);

}  // namespace blockadapt::optim
