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

#include "blockadapt/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "blockadapt/clipping.hpp"
#include "blockadapt/data.hpp"
#include "blockadapt/errors.hpp"
#include "blockadapt/rng.hpp"

namespace blockadapt::cli {

namespace {

using json = nlohmann::ordered_json;

// Distinct sub-seeds so dataset generation, parameter init and batch
// sampling draw from unrelated streams.
std::uint64_t data_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x64617461ULL); }
std::uint64_t init_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x696e6974ULL); }
std::uint64_t batch_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x62617463ULL); }

grouping::Partition build_partition(const RunConfig& cfg,
                                    const grouping::TensorLayout& layout) {
  const std::size_t d = layout.total();
  switch (cfg.partition) {
    case RunConfig::PartitionKind::kChunk:
      return grouping::partition_chunk(d, cfg.block_size);
    case RunConfig::PartitionKind::kFull:
      return grouping::partition_chunk(d, d);
    case RunConfig::PartitionKind::kInputNeuron:
      return grouping::partition_input_neuron(layout, cfg.block_size);
    case RunConfig::PartitionKind::kLeadingAxis:
      return grouping::partition_leading_axis(layout, cfg.block_size);
    case RunConfig::PartitionKind::kDiag:
      break;
  }
  throw std::invalid_argument("build_partition: diag engine has no partition");
}

// One configured trajectory: dataset, model, optimizer engine and the
// diagnostic retention needed for the step-to-step spectrum change.
class Trainer {
 public:
  explicit Trainer(const RunConfig& cfg) : cfg_(cfg), spec_{cfg.widths, cfg.head} {
    cfg_.validate();
    spec_.validate();

    if (cfg_.dataset == RunConfig::DatasetKind::kToy) {
      ds_ = data::gen_toy(data_seed(cfg_.seed)).dataset;
    } else {
      ds_ = data::load_idx(cfg_.mnist_images, cfg_.mnist_labels);
    }
    if (ds_.X.cols() != spec_.widths.front())
      throw DataError("dataset " + ds_.name + " has " + std::to_string(ds_.X.cols()) +
                      " features; model expects " +
                      std::to_string(spec_.widths.front()));
    if (static_cast<std::size_t>(ds_.num_classes) > spec_.num_classes())
      throw DataError("dataset " + ds_.name + " has " +
                      std::to_string(ds_.num_classes) + " classes; model head has " +
                      std::to_string(spec_.num_classes()));

    params_ = model::init_params(spec_, init_seed(cfg_.seed));

    if (cfg_.partition == RunConfig::PartitionKind::kDiag) {
      diag_.emplace(cfg_.design, params_.values.size(), cfg_.epsilon);
    } else {
      block_.emplace(cfg_.design, build_partition(cfg_, params_.layout), &params_.layout);
      block_->set_threads(cfg_.threads);
    }
    if (cfg_.clip) clip_.emplace(cfg_.clip_gamma, cfg_.clip_alpha_star);

    if (cfg_.steps) {
      total_steps_ = *cfg_.steps;
    } else {
      const std::size_t m = cfg_.batch.fixed_m;
      const std::uint64_t per_epoch = (ds_.X.rows() + m - 1) / m;
      total_steps_ = *cfg_.epochs * per_epoch;
    }

    if (!cfg_.resume.empty()) {
      if (block_)
        load_checkpoint(cfg_.resume, *block_, params_.values);
      else
        load_checkpoint(cfg_.resume, *diag_, params_.values);
      if (t() > total_steps_)
        throw ConfigError("resume: checkpoint step " + std::to_string(t()) +
                          " is past the configured horizon " +
                          std::to_string(total_steps_));
    }
  }

  std::uint64_t t() const { return block_ ? block_->state().t : diag_->t(); }
  std::uint64_t total_steps() const { return total_steps_; }
  bool done() const { return t() >= total_steps_; }
  std::span<const double> params() const { return params_.values; }
  const data::Dataset& dataset() const { return ds_; }
  const std::vector<diagnostics::TraceRecord>& trace() const { return trace_; }

  void step_once() {
    const std::uint64_t step_t = t() + 1;
    const data::Batch batch =
        data::sample_batch(ds_, cfg_.batch, step_t, batch_seed(cfg_.seed));
    model::LossGrad fb;
    try {
      fb = model::forward_backward(params_, spec_, batch.X, batch.y);
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(step_t) + ": " + e.what());
    }

    const double alpha = cfg_.alpha_at(step_t);
    std::optional<clipping::ClipBounds> bounds;
    if (clip_) bounds = clip_->bounds(step_t);

    const auto start = std::chrono::steady_clock::now();
    try {
      if (block_)
        block_->step(params_.values, fb.grad, alpha, bounds ? &*bounds : nullptr);
      else
        diag_->step(params_.values, fb.grad, alpha);
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(step_t) + ": " + e.what());
    }
    double wall_ms = 0.0;
    if (cfg_.timing)
      wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - start)
                    .count();

    for (double gi : fb.grad) g_inf_max_ = std::max(g_inf_max_, std::abs(gi));

    const bool logged = (step_t % cfg_.diag_every == 0) || step_t == total_steps_;
    if (logged) {
      diagnostics::TraceRecord row;
      row.t = step_t;
      row.loss = fb.loss;
      row.grad_norm_sq = 0.0;
      for (double gi : fb.grad) row.grad_norm_sq += gi * gi;
      row.batch_size = batch.y.size();
      row.wall_ms = wall_ms;
      fill_spectrum_stats(row, alpha, fb.grad);
      trace_.push_back(row);
      kappa_max_ = std::max(kappa_max_, row.kappa_t);
    }

    retain(alpha);
  }

  RunOutput finish() {
    RunOutput out;
    out.trace = trace_;
    out.steps_run = t();
    out.final_loss = model::forward_loss(params_, spec_, ds_.X, ds_.y);
    out.eval_accuracy = model::eval_accuracy(params_, spec_, ds_.X, ds_.y);
    for (const auto& row : trace_) {
      if (!out.min_grad_norm_sq || row.grad_norm_sq < *out.min_grad_norm_sq)
        out.min_grad_norm_sq = row.grad_norm_sq;
    }
    out.final_params = params_.values;

    if (!cfg_.checkpoint_out.empty()) {
      if (block_)
        save_checkpoint(cfg_.checkpoint_out, *block_, params_.values);
      else
        save_checkpoint(cfg_.checkpoint_out, *diag_, params_.values);
    }

    std::ostringstream csv;
    diagnostics::write_trace_csv(csv, trace_);
    out.trace_csv = csv.str();

    json summary;
    summary["final_loss"] = out.final_loss;
    summary["eval_accuracy"] = out.eval_accuracy;
    if (out.min_grad_norm_sq)
      summary["min_grad_norm_sq"] = *out.min_grad_norm_sq;
    else
      summary["min_grad_norm_sq"] = nullptr;
    summary["steps_run"] = out.steps_run;
    summary["seed"] = cfg_.seed;
    summary["grad_inf_max"] = g_inf_max_;
    if (!trace_.empty()) {
      summary["kappa_max"] = kappa_max_;
      summary["min_effective_spectrum"] = min_eff_spectrum_;
    } else {
      summary["kappa_max"] = nullptr;
      summary["min_effective_spectrum"] = nullptr;
    }
    // Advisory sufficient-condition checks for the EMA designs: the decay
    // must satisfy 1 - beta2 <= delta^2 / (9 G^2 kappa^2) and the step
    // size alpha <= 2 delta / (3 L kappa), with G the largest observed
    // gradient max-norm and L user-supplied.
    json checks;
    if (!trace_.empty() && g_inf_max_ > 0.0) {
      const double delta = cfg_.design.delta;
      checks["beta2_condition_ok"] =
          1.0 - cfg_.design.beta2 <=
          delta * delta / (9.0 * g_inf_max_ * g_inf_max_ * kappa_max_ * kappa_max_);
      if (cfg_.lipschitz_l)
        checks["alpha_condition_ok"] =
            cfg_.alpha <= 2.0 * delta / (3.0 * *cfg_.lipschitz_l * kappa_max_);
      else
        checks["alpha_condition_ok"] = nullptr;
    } else {
      checks["beta2_condition_ok"] = nullptr;
      checks["alpha_condition_ok"] = nullptr;
    }
    summary["convergence_checks"] = checks;
    json cfg_echo;
    for (const auto& [k, v] : cfg_.echo()) cfg_echo[k] = v;
    summary["config"] = cfg_echo;
    out.summary_json = summary.dump(2) + "\n";
    return out;
  }

 private:
  void fill_spectrum_stats(diagnostics::TraceRecord& row, double alpha,
                           std::span<const double> g) {
    const auto& design = cfg_.design;
    if (design.variant == optim::Variant::kSgd) {
      // Plain-SGD convention: the preconditioner is alpha * I.
      row.term_a = alpha * alpha * row.grad_norm_sq;
      if (has_prev_) {
        const double dalpha = std::abs(alpha - prev_alpha_);
        row.term_b = block_ ? dalpha : dalpha * static_cast<double>(g.size());
      }
      row.kappa_t = 1.0;
      min_eff_spectrum_ = std::min(min_eff_spectrum_, alpha);
      return;
    }
    if (block_) {
      const optim::BlockDiagMatrix v = block_->effective_second_moment();
      row.term_a = diagnostics::term_a(alpha, v, design.delta, g);
      if (has_prev_)
        row.term_b = diagnostics::term_b(alpha, v, prev_alpha_, prev_v_, design.delta);
      row.kappa_t = diagnostics::kappa_t(v, design.beta2, design.delta);
      min_eff_spectrum_ = std::min(
          min_eff_spectrum_,
          diagnostics::min_effective_spectrum(alpha, v, design.delta));
    } else {
      const auto v = diag_->v_hat();
      row.term_a = diagnostics::diag_term_a(alpha, v, cfg_.epsilon, g);
      if (has_prev_)
        row.term_b = diagnostics::diag_term_b(alpha, v, prev_alpha_, prev_v_diag_,
                                              cfg_.epsilon);
      row.kappa_t = diagnostics::diag_kappa(v, design.beta2, design.delta);
      for (double vi : v)
        min_eff_spectrum_ = std::min(
            min_eff_spectrum_, alpha / (std::sqrt(std::max(vi, 0.0)) + cfg_.epsilon));
    }
  }

  // Keeps the previous step's effective accumulator for the spectrum-change
  // diagnostic (cost: one block-matrix copy per step).
  void retain(double alpha) {
    prev_alpha_ = alpha;
    has_prev_ = true;
    if (cfg_.design.variant == optim::Variant::kSgd) return;
    if (block_) {
      prev_v_ = block_->effective_second_moment();
    } else {
      const auto v = diag_->v_hat();
      prev_v_diag_.assign(v.begin(), v.end());
    }
  }

  RunConfig cfg_;
  model::MlpSpec spec_;
  data::Dataset ds_;
  model::ModelParams params_;
  std::optional<optim::BlockOptimizer> block_;
  std::optional<optim::DiagonalOptimizer> diag_;
  std::optional<clipping::ClipSchedule> clip_;
  std::uint64_t total_steps_ = 0;

  bool has_prev_ = false;
  double prev_alpha_ = 0.0;
  optim::BlockDiagMatrix prev_v_;
  std::vector<double> prev_v_diag_;

  double g_inf_max_ = 0.0;
  double kappa_max_ = 1.0;
  double min_eff_spectrum_ = std::numeric_limits<double>::infinity();
  std::vector<diagnostics::TraceRecord> trace_;
};

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RunOutput run_experiment(const RunConfig& cfg,
                         const std::optional<std::filesystem::path>& out_dir) {
  Trainer trainer(cfg);
  while (!trainer.done()) trainer.step_once();
  RunOutput out = trainer.finish();
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_text(*out_dir / "trace.csv", out.trace_csv);
    write_text(*out_dir / "summary.json", out.summary_json);
  }
  return out;
}

CompareOutput run_compare(const RunConfig& a, const RunConfig& b,
                          const std::optional<std::filesystem::path>& out_dir) {
  if (a.dataset != b.dataset || a.mnist_images != b.mnist_images ||
      a.mnist_labels != b.mnist_labels)
    throw ConfigError("compare: configs must share the dataset");
  if (a.widths != b.widths || a.head != b.head)
    throw ConfigError("compare: configs must share the model");
  if (a.seed != b.seed) throw ConfigError("compare: configs must share the seed");

  if (a.diag_every != b.diag_every)
    throw ConfigError("compare: configs must share diag_every");

  Trainer ta(a);
  Trainer tb(b);
  if (ta.total_steps() != tb.total_steps())
    throw ConfigError("compare: configs must run the same number of steps");

  // Lockstep execution so the parameter gap is observable per step. Both
  // runs log at identical steps (same diag_every and horizon).
  std::size_t joined_rows = 0;
  CompareOutput out;
  std::ostringstream joined;
  joined << "t";
  const char* fields[] = {"loss",    "grad_norm_sq", "term_a", "term_b",
                          "kappa_t", "batch_size",   "wall_ms"};
  for (const char* f : fields) joined << ',' << f << "_a," << f << "_b";
  joined << ",param_maxdiff\n";

  while (!ta.done()) {
    ta.step_once();
    tb.step_once();
    if (ta.trace().size() != tb.trace().size())
      throw Error("compare: internal logging mismatch");
    if (ta.trace().size() == joined_rows) continue;
    const auto& ra = ta.trace().back();
    const auto& rb = tb.trace().back();
    double maxdiff = 0.0;
    const auto pa = ta.params();
    const auto pb = tb.params();
    for (std::size_t i = 0; i < pa.size(); ++i)
      maxdiff = std::max(maxdiff, std::abs(pa[i] - pb[i]));
    out.param_maxdiff_max = std::max(out.param_maxdiff_max, maxdiff);
    joined << ra.t << ',' << fmt(ra.loss) << ',' << fmt(rb.loss) << ','
           << fmt(ra.grad_norm_sq) << ',' << fmt(rb.grad_norm_sq) << ','
           << fmt(ra.term_a) << ',' << fmt(rb.term_a) << ',' << fmt(ra.term_b)
           << ',' << fmt(rb.term_b) << ',' << fmt(ra.kappa_t) << ','
           << fmt(rb.kappa_t) << ',' << ra.batch_size << ',' << rb.batch_size
           << ',' << fmt(ra.wall_ms) << ',' << fmt(rb.wall_ms) << ','
           << fmt(maxdiff) << '\n';
    ++joined_rows;
  }

  out.a = ta.finish();
  out.b = tb.finish();
  out.joined_csv = joined.str();

  std::vector<double> tb_a;
  std::vector<double> tb_b;
  for (const auto& r : out.a.trace) tb_a.push_back(r.term_b);
  for (const auto& r : out.b.trace) tb_b.push_back(r.term_b);

  json summary;
  summary["final_loss_a"] = out.a.final_loss;
  summary["final_loss_b"] = out.b.final_loss;
  summary["final_loss_ratio_b_over_a"] = out.b.final_loss / out.a.final_loss;
  const double med_a = median(tb_a);
  const double med_b = median(tb_b);
  if (std::isnan(med_a)) {
    summary["median_term_b_a"] = nullptr;
    summary["median_term_b_b"] = nullptr;
    summary["median_term_b_ratio_b_over_a"] = nullptr;
  } else {
    summary["median_term_b_a"] = med_a;
    summary["median_term_b_b"] = med_b;
    summary["median_term_b_ratio_b_over_a"] = med_b / med_a;
  }
  summary["param_maxdiff_max"] = out.param_maxdiff_max;
  summary["joined_rows"] = joined_rows;
  json cfg_a;
  for (const auto& [k, v] : a.echo()) cfg_a[k] = v;
  json cfg_b;
  for (const auto& [k, v] : b.echo()) cfg_b[k] = v;
  summary["config_a"] = cfg_a;
  summary["config_b"] = cfg_b;
  out.summary_json = summary.dump(2) + "\n";

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_text(*out_dir / "trace_a.csv", out.a.trace_csv);
    write_text(*out_dir / "trace_b.csv", out.b.trace_csv);
    write_text(*out_dir / "compare.csv", out.joined_csv);
    write_text(*out_dir / "summary.json", out.summary_json);
  }
  return out;
}

}  // namespace blockadapt::cli
