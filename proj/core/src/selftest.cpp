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

#include "blockadapt/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>

#include "blockadapt/clipping.hpp"
#include "blockadapt/config.hpp"
#include "blockadapt/data.hpp"
#include "blockadapt/diagnostics.hpp"
#include "blockadapt/errors.hpp"
#include "blockadapt/model.hpp"
#include "blockadapt/optimizer.hpp"
#include "blockadapt/rng.hpp"
#include "blockadapt/runner.hpp"

namespace blockadapt::selftest {

namespace {

using cli::RunConfig;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

RunConfig toy_config(optim::Design design, RunConfig::PartitionKind partition,
                     std::size_t block_size, double alpha, std::uint64_t steps,
                     std::uint64_t seed, std::uint64_t diag_every) {
  RunConfig cfg;
  cfg.dataset = RunConfig::DatasetKind::kToy;
  cfg.widths = {2, 2, 2, 1};
  cfg.head = model::Head::kSigmoidBce;
  cfg.design = design;
  cfg.epsilon = design.delta;
  cfg.partition = partition;
  cfg.block_size = block_size;
  cfg.alpha = alpha;
  cfg.batch = data::BatchSchedule::fixed(10);
  cfg.steps = steps;
  cfg.seed = seed;
  cfg.diag_every = diag_every;
  return cfg;
}

// --- A1: block optimizer at group size 1 against the diagonal reference ---

CriterionResult a1() {
  Timer timer;
  const optim::Design designs[] = {
      optim::Design::adagrad(), optim::Design::adafom(), optim::Design::rmsprop(),
      optim::Design::adam(), optim::Design::amsgrad()};
  double worst = 0.0;
  for (const auto& design : designs) {
    RunConfig block = toy_config(design, RunConfig::PartitionKind::kChunk, 1, 0.05,
                                 100, 1, 1);
    RunConfig diag = block;
    diag.partition = RunConfig::PartitionKind::kDiag;
    diag.block_size = 0;
    const cli::CompareOutput cmp = cli::run_compare(block, diag, std::nullopt);
    worst = std::max(worst, cmp.param_maxdiff_max);
  }
  const double secs = timer.seconds();
  CriterionResult r{"A1", worst <= 1e-9 && secs < 5.0, "", secs};
  r.detail = "5 designs, 100 steps, group size 1 vs diagonal reference: max |dx| = " +
             num(worst) + " (tol 1e-9)";
  return r;
}

// --- A2: r = 1 block optimizer against the dense reference ---

CriterionResult a2() {
  Timer timer;
  const model::MlpSpec spec{{1, 2, 2}, model::Head::kSoftmaxCe};
  const std::size_t d = spec.param_count();

  Rng rng(42);
  Matrix X(10, 1);
  std::vector<int> y(10);
  for (std::size_t i = 0; i < 10; ++i) {
    X(i, 0) = rng.normal();
    y[i] = static_cast<int>(rng.next_u64() % 2);
  }

  double worst = 0.0;
  for (const auto& design : {optim::Design::adam(), optim::Design::adagrad()}) {
    model::ModelParams pa = model::init_params(spec, 9);
    model::ModelParams pb = pa;
    optim::BlockOptimizer block(design, grouping::partition_chunk(d, d));
    optim::DenseOptimizer dense(design, d);
    for (int t = 0; t < 50; ++t) {
      const auto ga = model::forward_backward(pa, spec, X, y);
      block.step(pa.values, ga.grad, 0.05);
      const auto gb = model::forward_backward(pb, spec, X, y);
      dense.step(pb.values, gb.grad, 0.05);
      for (std::size_t i = 0; i < d; ++i)
        worst = std::max(worst, std::abs(pa.values[i] - pb.values[i]));
    }
  }
  const double secs = timer.seconds();
  CriterionResult r{"A2", worst <= 1e-8 && secs < 5.0, "", secs};
  r.detail = "adam+adagrad, 50 steps, 10 params, r=1 vs dense reference: max |dx| = " +
             num(worst) + " (tol 1e-8)";
  return r;
}

// --- A3: eigendecomposition suite on random SPD matrices ---

CriterionResult a3() {
  Timer timer;
  Rng rng(7);
  double worst_recon = 0.0;
  double worst_orth = 0.0;
  double worst_inv = 0.0;
  const double delta = 1e-4;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.next_u64() % 25;
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

    const linalg::EigDecomp eig = linalg::eigh(m);
    const linalg::SymMatrix recon = linalg::from_spectrum(eig, eig.eigvals);
    double recon_err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        recon_err = std::max(recon_err, std::abs(recon(i, j) - m(i, j)));
    worst_recon = std::max(worst_recon, recon_err / m.max_abs());

    const Matrix vtv = matmul(transpose(eig.eigvecs), eig.eigvecs);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        worst_orth = std::max(worst_orth,
                              std::abs(vtv(i, j) - (i == j ? 1.0 : 0.0)));

    std::vector<double> sqrt_vals(n);
    for (std::size_t i = 0; i < n; ++i)
      sqrt_vals[i] = std::sqrt(std::max(eig.eigvals[i], 0.0));
    linalg::SymMatrix shifted_root = linalg::from_spectrum(eig, sqrt_vals);
    for (std::size_t i = 0; i < n; ++i)
      shifted_root.set(i, i, shifted_root(i, i) + delta);
    const linalg::SymMatrix inv = linalg::inv_sqrt_shift(m, delta);
    const Matrix prod = matmul(inv.dense(), shifted_root.dense());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        worst_inv = std::max(worst_inv, std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)));
  }
  const double secs = timer.seconds();
  const bool pass =
      worst_recon <= 1e-10 && worst_orth <= 1e-8 && worst_inv <= 1e-8 && secs < 10.0;
  CriterionResult r{"A3", pass, "", secs};
  r.detail = "200 SPD matrices (n 1..25): recon/||M||max = " + num(worst_recon) +
             " (tol 1e-10), orth = " + num(worst_orth) +
             ", invsqrt consistency = " + num(worst_inv) + " (tol 1e-8)";
  return r;
}

// --- A4: analytic gradients against central finite differences ---

CriterionResult a4() {
  Timer timer;
  const auto small = model::gradient_check({{2, 2, 2, 1}, model::Head::kSigmoidBce}, 3);
  const auto large =
      model::gradient_check({{784, 100, 10}, model::Head::kSoftmaxCe}, 3, 200);
  const double secs = timer.seconds();
  const bool pass = small.pass && large.pass && secs < 30.0;
  CriterionResult r{"A4", pass, "", secs};
  r.detail = "[2,2,2,1] max rel err = " + num(small.max_rel_error) +
             ", [784,100,10] sampled max rel err = " + num(large.max_rel_error) +
             " (tol 1e-5)";
  return r;
}

// --- A5: full-matrix vs diagonal accumulation on the teacher problem ---

CriterionResult a5() {
  Timer timer;
  const double alphas[] = {0.1, 0.05, 0.01};
  const std::uint64_t seeds[] = {0, 1, 2, 3, 4};

  auto best_median = [&](RunConfig::PartitionKind kind) {
    double best = std::numeric_limits<double>::infinity();
    for (double alpha : alphas) {
      std::vector<double> losses;
      for (std::uint64_t seed : seeds) {
        RunConfig cfg =
            toy_config(optim::Design::adagrad(), kind, 0, alpha, 500, seed, 500);
        const cli::RunOutput out = cli::run_experiment(cfg, std::nullopt);
        losses.push_back(out.final_loss);
      }
      best = std::min(best, median(losses));
    }
    return best;
  };

  const double full = best_median(RunConfig::PartitionKind::kFull);
  const double diag = best_median(RunConfig::PartitionKind::kDiag);
  const double secs = timer.seconds();
  const bool pass = full <= diag && secs < 120.0;
  CriterionResult r{"A5", pass, "", secs};
  r.detail = "adagrad 500 iters, 5 seeds, best-of {0.1,0.05,0.01}: median final loss "
             "full = " + num(full) + " vs diag = " + num(diag);
  return r;
}

// --- A6: spectrum-change dynamics, block vs diagonal ---

void write_surrogate(const std::string& images, const std::string& labels,
                     std::uint64_t seed) {
  const std::size_t n = 12800;
  const std::size_t p = 784;
  const int classes = 10;
  Rng rng(seed);
  Matrix centers(classes, p);
  for (std::size_t c = 0; c < static_cast<std::size_t>(classes); ++c)
    for (std::size_t k = 0; k < p; ++k) centers(c, k) = rng.uniform01();
  data::Dataset ds;
  ds.X = Matrix(n, p);
  ds.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % classes);
    ds.y[i] = label;
    for (std::size_t k = 0; k < p; ++k)
      ds.X(i, k) = std::clamp(
          0.7 * centers(static_cast<std::size_t>(label), k) + 0.3 * rng.uniform01(),
          0.0, 1.0);
  }
  ds.name = "surrogate";
  ds.num_classes = classes;
  data::save_idx(images, labels, ds);
}

CriterionResult a6(const Options& options) {
  Timer timer;
  std::string images = options.mnist_images;
  std::string labels = options.mnist_labels;
  bool surrogate = images.empty() || labels.empty();
  if (surrogate) {
    images = (options.scratch_dir / "surrogate-images-idx3-ubyte").string();
    labels = (options.scratch_dir / "surrogate-labels-idx1-ubyte").string();
    write_surrogate(images, labels, 2026);
  }

  RunConfig block;
  block.dataset = RunConfig::DatasetKind::kMnist;
  block.mnist_images = images;
  block.mnist_labels = labels;
  block.widths = {784, 100, 10};
  block.head = model::Head::kSoftmaxCe;
  block.design = optim::Design::adam();
  block.epsilon = block.design.delta;
  block.partition = RunConfig::PartitionKind::kInputNeuron;
  block.block_size = 10;
  block.alpha = 0.001;
  block.batch = data::BatchSchedule::fixed(128);
  block.epochs = 1;
  block.seed = 5;
  block.diag_every = 10;

  RunConfig diag = block;
  diag.partition = RunConfig::PartitionKind::kDiag;
  diag.block_size = 0;

  const cli::CompareOutput cmp = cli::run_compare(block, diag, std::nullopt);
  std::vector<double> tb_block;
  std::vector<double> tb_diag;
  for (const auto& row : cmp.a.trace)
    if (row.t >= 2) tb_block.push_back(row.term_b);
  for (const auto& row : cmp.b.trace)
    if (row.t >= 2) tb_diag.push_back(row.term_b);
  const double med_block = median(tb_block);
  const double med_diag = median(tb_diag);
  const bool dynamics_ok = med_block < med_diag;

  // Group-size-1 control on the teacher problem: the max-norm spectrum
  // change can never exceed the l1 version on the same trajectory.
  const model::MlpSpec spec{{2, 2, 2, 1}, model::Head::kSigmoidBce};
  const data::ToyProblem toy = data::gen_toy(6);
  model::ModelParams params = model::init_params(spec, 6);
  optim::BlockOptimizer opt(optim::Design::adam(),
                            grouping::partition_chunk(spec.param_count(), 1));
  const double alpha = 0.01;
  const double delta = opt.design().delta;
  bool control_ok = true;
  double prev_alpha = 0.0;
  optim::BlockDiagMatrix prev_v;
  std::vector<double> prev_diag;
  for (int t = 1; t <= 200; ++t) {
    const auto fb = model::forward_backward(params, spec, toy.dataset.X, toy.dataset.y);
    opt.step(params.values, fb.grad, alpha);
    const optim::BlockDiagMatrix v = opt.effective_second_moment();
    std::vector<double> v_diag(v.blocks.size());
    for (std::size_t j = 0; j < v.blocks.size(); ++j) v_diag[j] = v.blocks[j](0, 0);
    if (t >= 2) {
      const double q = diagnostics::term_b(alpha, v, prev_alpha, prev_v, delta);
      const double l1 = diagnostics::diag_term_b(alpha, v_diag, prev_alpha, prev_diag,
                                                 delta);
      if (q > l1) control_ok = false;
    }
    prev_alpha = alpha;
    prev_v = v;
    prev_diag = v_diag;
  }

  const double secs = timer.seconds();
  const bool pass = dynamics_ok && control_ok && secs < 600.0;
  CriterionResult r{"A6", pass, "", secs};
  r.detail = std::string(surrogate ? "surrogate 784-dim dataset" : "MNIST") +
             ", 784-100-10, M=128, adam, 1 epoch: median spectrum-change block(10) = " +
             num(med_block) + " < diag l1 = " + num(med_diag) +
             (dynamics_ok ? "" : " VIOLATED") +
             "; group-size-1 control max<=l1 at every step: " +
             (control_ok ? "ok" : "VIOLATED");
  return r;
}

// --- A7: spectrum clipping invariants along a trajectory ---

CriterionResult a7() {
  Timer timer;
  const model::MlpSpec spec{{2, 2, 2, 1}, model::Head::kSigmoidBce};
  const data::ToyProblem toy = data::gen_toy(7);
  const double alpha = 0.05;
  const double alpha_star = 0.1;
  const clipping::ClipSchedule sched(1e-3, alpha_star);

  bool bounds_ok = true;
  bool deviation_ok = true;
  {
    model::ModelParams params = model::init_params(spec, 7);
    optim::BlockOptimizer opt(optim::Design::adam(),
                              grouping::partition_chunk(spec.param_count(), 3));
    std::vector<std::vector<double>> spectra;
    for (int t = 1; t <= 100; ++t) {
      const auto fb =
          model::forward_backward(params, spec, toy.dataset.X, toy.dataset.y);
      const clipping::ClipBounds bounds = sched.bounds(static_cast<std::uint64_t>(t));
      opt.advance(fb.grad);
      const std::vector<double> m(opt.state().m);
      const std::vector<double> before = params.values;
      opt.apply_update(params.values, alpha, &bounds, &spectra);
      for (const auto& block_spec : spectra)
        for (double s : block_spec)
          if (s < bounds.lower || s > bounds.upper) bounds_ok = false;

      double dev_sq = 0.0;
      double m_sq = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i) {
        const double dx = params.values[i] - before[i];
        dev_sq += (dx + alpha_star * m[i]) * (dx + alpha_star * m[i]);
        m_sq += m[i] * m[i];
      }
      const double margin =
          std::max(bounds.upper - alpha_star, alpha_star - bounds.lower);
      if (std::sqrt(dev_sq) > margin * std::sqrt(m_sq) * (1.0 + 1e-12) + 1e-15)
        deviation_ok = false;
    }
  }

  // Collapsed interval: the update degenerates to a plain SGD step.
  bool collapsed_ok = true;
  {
    model::ModelParams params = model::init_params(spec, 7);
    optim::BlockOptimizer opt(optim::Design::adam(),
                              grouping::partition_chunk(spec.param_count(), 3));
    const clipping::ClipBounds collapsed{alpha_star, alpha_star};
    for (int t = 1; t <= 20; ++t) {
      const auto fb =
          model::forward_backward(params, spec, toy.dataset.X, toy.dataset.y);
      opt.advance(fb.grad);
      const std::vector<double> m(opt.state().m);
      const std::vector<double> before = params.values;
      opt.apply_update(params.values, alpha, &collapsed);
      for (std::size_t i = 0; i < m.size(); ++i) {
        const double dx = params.values[i] - before[i];
        if (std::abs(dx + alpha_star * m[i]) > 1e-12) collapsed_ok = false;
      }
    }
  }

  const double secs = timer.seconds();
  const bool pass = bounds_ok && deviation_ok && collapsed_ok && secs < 10.0;
  CriterionResult r{"A7", pass, "", secs};
  r.detail = std::string("applied spectrum within bounds: ") +
             (bounds_ok ? "ok" : "VIOLATED") +
             "; deviation bound: " + (deviation_ok ? "ok" : "VIOLATED") +
             "; collapsed interval = SGD step to 1e-12: " +
             (collapsed_ok ? "ok" : "VIOLATED");
  return r;
}

// --- A8: increasing-minibatch convergence on a noisy least-squares task ---

struct LeastSquares {
  Matrix A;               // n x d features
  std::vector<double> b;  // targets

  std::vector<double> grad_at(std::span<const double> x,
                              std::span<const std::size_t> rows) const {
    std::vector<double> g(A.cols(), 0.0);
    for (std::size_t row : rows) {
      const auto a = A.row(row);
      double resid = -b[row];
      for (std::size_t k = 0; k < a.size(); ++k) resid += a[k] * x[k];
      for (std::size_t k = 0; k < a.size(); ++k) g[k] += resid * a[k];
    }
    for (double& gi : g) gi /= static_cast<double>(rows.size());
    return g;
  }

  double full_grad_norm_sq(std::span<const double> x) const {
    std::vector<std::size_t> all(A.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto g = grad_at(x, all);
    double s = 0.0;
    for (double gi : g) s += gi * gi;
    return s;
  }
};

LeastSquares make_least_squares(std::uint64_t seed) {
  const std::size_t n = 512;
  const std::size_t d = 20;
  Rng rng(seed);
  std::vector<double> target(d);
  for (auto& v : target) v = rng.normal();
  LeastSquares ls;
  ls.A = Matrix(n, d);
  ls.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double dot = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      ls.A(i, k) = rng.normal();
      dot += ls.A(i, k) * target[k];
    }
    ls.b[i] = dot + 0.5 * rng.normal();
  }
  return ls;
}

double min_grad_floor(const LeastSquares& ls, const data::BatchSchedule& schedule,
                      std::uint64_t seed) {
  const std::size_t d = ls.A.cols();
  optim::Design design = optim::Design::adam();
  design.delta = 0.1;
  optim::BlockOptimizer opt(design, grouping::partition_chunk(d, 5));
  std::vector<double> x(d, 0.0);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t t = 1; t <= 2000; ++t) {
    const std::size_t m = schedule.batch_size(t, ls.A.rows());
    const auto rows = data::sample_indices(ls.A.rows(), m, t, seed);
    const auto g = ls.grad_at(x, rows);
    opt.step(x, g, 0.01);
    best = std::min(best, ls.full_grad_norm_sq(x));
  }
  return best;
}

CriterionResult a8() {
  Timer timer;
  std::vector<double> floors_linear;
  std::vector<double> floors_fixed;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const LeastSquares ls = make_least_squares(100 + seed);
    floors_linear.push_back(
        min_grad_floor(ls, data::BatchSchedule::linear(1.0), seed));
    floors_fixed.push_back(min_grad_floor(ls, data::BatchSchedule::fixed(4), seed));
  }
  const double med_linear = median(floors_linear);
  const double med_fixed = median(floors_fixed);
  const double secs = timer.seconds();
  const bool pass = med_linear < 1e-3 && med_linear < med_fixed && secs < 60.0;
  CriterionResult r{"A8", pass, "", secs};
  r.detail = "block-adam on 20-d noisy least squares, 2000 steps, 5-seed medians: "
             "min ||grad||^2 linear batch = " + num(med_linear) +
             " (tol 1e-3) vs fixed(4) = " + num(med_fixed);
  return r;
}

// --- A9: byte determinism and checkpoint resume ---

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CriterionResult a9(const Options& options) {
  Timer timer;
  const std::filesystem::path dir = options.scratch_dir / "a9";
  std::filesystem::create_directories(dir);

  RunConfig cfg = toy_config(optim::Design::adam(), RunConfig::PartitionKind::kChunk,
                             3, 0.05, 60, 11, 5);

  const cli::RunOutput run1 = cli::run_experiment(cfg, dir / "run1");
  const cli::RunOutput run2 = cli::run_experiment(cfg, dir / "run2");
  const bool bytes_ok =
      slurp(dir / "run1" / "trace.csv") == slurp(dir / "run2" / "trace.csv") &&
      slurp(dir / "run1" / "summary.json") == slurp(dir / "run2" / "summary.json") &&
      !run1.trace_csv.empty();

  RunConfig half = cfg;
  half.steps = 30;
  half.checkpoint_out = (dir / "half.ckpt").string();
  cli::run_experiment(half, std::nullopt);

  RunConfig resumed = cfg;
  resumed.resume = (dir / "half.ckpt").string();
  const cli::RunOutput run3 = cli::run_experiment(resumed, std::nullopt);

  bool resume_ok = run3.final_params == run1.final_params;
  // Every row the resumed run logged must be byte-identical to the same
  // row of the straight run.
  std::size_t matched = 0;
  std::istringstream straight(run1.trace_csv);
  std::vector<std::string> straight_lines;
  for (std::string line; std::getline(straight, line);) straight_lines.push_back(line);
  std::istringstream res(run3.trace_csv);
  std::vector<std::string> resumed_lines;
  for (std::string line; std::getline(res, line);) resumed_lines.push_back(line);
  for (const std::string& line : resumed_lines) {
    if (line == resumed_lines.front()) continue;  // header
    if (std::find(straight_lines.begin(), straight_lines.end(), line) ==
        straight_lines.end())
      resume_ok = false;
    else
      ++matched;
  }
  if (matched == 0) resume_ok = false;

  const double secs = timer.seconds();
  const bool pass = bytes_ok && resume_ok && secs < 60.0;
  CriterionResult r{"A9", pass, "", secs};
  r.detail = std::string("identical reruns byte-identical: ") +
             (bytes_ok ? "ok" : "VIOLATED") + "; checkpoint resume matches (" +
             std::to_string(matched) + " rows + final params): " +
             (resume_ok ? "ok" : "VIOLATED");
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const Options& options, std::ostream& log) {
  Options opts = options;
  if (opts.scratch_dir.empty())
    opts.scratch_dir = std::filesystem::temp_directory_path() / "blockadapt-selftest";
  std::filesystem::create_directories(opts.scratch_dir);

  std::vector<CriterionResult> results;
  const auto record = [&](CriterionResult r) {
    char secs[32];
    std::snprintf(secs, sizeof(secs), "%.1fs", r.seconds);
    log << r.id << (r.pass ? " PASS  " : " FAIL  ") << r.detail << "  [" << secs
        << "]" << std::endl;
    results.push_back(std::move(r));
  };
  const auto want = [&](const char* id) {
    return opts.only.empty() || opts.only == id;
  };
  if (want("A1")) record(a1());
  if (want("A2")) record(a2());
  if (want("A3")) record(a3());
  if (want("A4")) record(a4());
  if (want("A5")) record(a5());
  if (want("A6")) record(a6(opts));
  if (want("A7")) record(a7());
  if (want("A8")) record(a8());
  if (want("A9")) record(a9(opts));
  return results;
}

int count_failures(const std::vector<CriterionResult>& results) {
  int fails = 0;
  for (const auto& r : results)
    if (!r.pass) ++fails;
  return fails;
}

}  // namespace blockadapt::selftest
