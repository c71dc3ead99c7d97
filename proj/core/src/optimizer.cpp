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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "blockadapt/errors.hpp"

namespace blockadapt::optim {

namespace {

// Static-free parallel loop over block indices. Writes from the body must
// be index-addressed so results do not depend on execution order.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (std::size_t k = 0; k < nt; ++k) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kSgd: return "sgd";
    case Variant::kAdaGrad: return "adagrad";
    case Variant::kAdaFom: return "adafom";
    case Variant::kRmsProp: return "rmsprop";
    case Variant::kAdam: return "adam";
    case Variant::kAmsGrad: return "amsgrad";
  }
  return "?";
}

void Design::validate() const {
  if (!(beta1 >= 0.0 && beta1 < 1.0))
    throw std::invalid_argument("Design: beta1 must be in [0,1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0))
    throw std::invalid_argument("Design: beta2 must be in [0,1)");
  if (!(delta > 0.0)) throw std::invalid_argument("Design: delta must be positive");
  if (!uses_first_moment_blend() && beta1 != 0.0)
    throw std::invalid_argument(std::string("Design: ") + variant_name(variant) +
                                " requires beta1 = 0");
  if (decay.mode == Beta1Decay::Mode::kExponential &&
      !(decay.lambda > 0.0 && decay.lambda < 1.0))
    throw std::invalid_argument("Design: exponential decay lambda must be in (0,1)");
}

double Design::beta1_at(std::uint64_t t) const {
  if (decay.mode == Beta1Decay::Mode::kExponential)
    return beta1 * std::pow(decay.lambda, static_cast<double>(t - 1));
  return beta1;
}

Design Design::sgd(double delta) { return {Variant::kSgd, 0.0, {}, 0.999, delta}; }
Design Design::adagrad(double delta) { return {Variant::kAdaGrad, 0.0, {}, 0.999, delta}; }
Design Design::adafom(double beta1, double delta) {
  return {Variant::kAdaFom, beta1, {}, 0.999, delta};
}
Design Design::rmsprop(double beta2, double delta) {
  return {Variant::kRmsProp, 0.0, {}, beta2, delta};
}
Design Design::adam(double beta1, double beta2, double delta) {
  return {Variant::kAdam, beta1, {}, beta2, delta};
}
Design Design::amsgrad(double beta1, double beta2, double delta) {
  return {Variant::kAmsGrad, beta1, {}, beta2, delta};
}

BlockDiagMatrix BlockDiagMatrix::zeros(const grouping::Partition& p) {
  BlockDiagMatrix m;
  m.partition = p;
  m.blocks.reserve(p.group_count());
  for (std::size_t j = 0; j < p.group_count(); ++j)
    m.blocks.emplace_back(p.group_size(j));
  return m;
}

std::size_t OptimizerState::value_count() const {
  std::size_t n = m.size();
  for (const auto& b : second_moment.blocks) n += b.dim() * b.dim();
  return n;
}

BlockOptimizer::BlockOptimizer(Design design, grouping::Partition partition,
                               const grouping::TensorLayout* layout)
    : design_(design), partition_(std::move(partition)), layout_(layout) {
  design_.validate();
  if (layout_ && layout_->total() != partition_.total())
    throw std::invalid_argument("BlockOptimizer: layout does not match partition");
  state_.m.assign(partition_.total(), 0.0);
  state_.second_moment = BlockDiagMatrix::zeros(partition_);
  if (design_.variant == Variant::kAmsGrad) {
    state_.ams_eigmax.resize(partition_.group_count());
    for (std::size_t j = 0; j < partition_.group_count(); ++j)
      state_.ams_eigmax[j].assign(partition_.group_size(j), 0.0);
  }
}

void BlockOptimizer::set_threads(int threads) {
  if (threads < 1) throw std::invalid_argument("set_threads: threads must be >= 1");
  threads_ = threads;
}

void BlockOptimizer::advance(std::span<const double> g) {
  const std::size_t d = partition_.total();
  if (g.size() != d)
    throw std::invalid_argument("advance: gradient length does not match partition");
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(g[i])) {
      std::string where = layout_ ? "tensor " + layout_->name_at(i)
                                  : "index " + std::to_string(i);
      throw NumericalError("advance: non-finite gradient entry in " + where);
    }
  }

  state_.t += 1;
  const double b1 = design_.beta1_at(state_.t);
  for (std::size_t i = 0; i < d; ++i)
    state_.m[i] = b1 * state_.m[i] + (1.0 - b1) * g[i];

  if (!design_.uses_second_moment()) return;

  const std::size_t r = partition_.group_count();
  if (design_.variant == Variant::kAmsGrad) effective_eig_.resize(r);

  const double td = static_cast<double>(state_.t);
  parallel_for(r, threads_, [&](std::size_t j) {
    auto gj = grouping::gather_block(g, partition_, j);
    auto& b = state_.second_moment.blocks[j];
    switch (design_.variant) {
      case Variant::kAdaGrad:
      case Variant::kAdaFom:
        b.scale(td - 1.0);
        b.add_scaled_outer(gj, 1.0);
        b.scale(1.0 / td);
        break;
      case Variant::kRmsProp:
      case Variant::kAdam:
        b.scale(design_.beta2);
        b.add_scaled_outer(gj, 1.0 - design_.beta2);
        break;
      case Variant::kAmsGrad: {
        b.scale(design_.beta2);
        b.add_scaled_outer(gj, 1.0 - design_.beta2);
        linalg::EigDecomp eig = linalg::eigh(b);
        auto& maxima = state_.ams_eigmax[j];
        for (std::size_t i = 0; i < maxima.size(); ++i)
          maxima[i] = std::max(maxima[i], eig.eigvals[i]);
        effective_eig_[j] = {maxima, std::move(eig.eigvecs)};
        break;
      }
      case Variant::kSgd:
        break;
    }
  });
}

void BlockOptimizer::apply_update(std::span<double> x, double alpha,
                                  const clipping::ClipBounds* bounds,
                                  std::vector<std::vector<double>>* applied_spectrum) {
  const std::size_t d = partition_.total();
  if (x.size() != d)
    throw std::invalid_argument("apply_update: parameter length does not match partition");
  const std::size_t r = partition_.group_count();
  if (applied_spectrum) applied_spectrum->assign(r, {});

  if (design_.variant == Variant::kSgd) {
    double s = alpha;
    if (bounds) s = std::clamp(s, bounds->lower, bounds->upper);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] -= s * state_.m[i];
      if (!std::isfinite(x[i]))
        throw NumericalError("apply_update: non-finite parameter at index " +
                             std::to_string(i));
    }
    if (applied_spectrum)
      for (std::size_t j = 0; j < r; ++j)
        (*applied_spectrum)[j].assign(partition_.group_size(j), s);
    return;
  }

  parallel_for(r, threads_, [&](std::size_t j) {
    const auto& b = state_.second_moment.blocks[j];
    linalg::EigDecomp eig;
    if (design_.variant == Variant::kAmsGrad && j < effective_eig_.size() &&
        !effective_eig_[j].eigvals.empty()) {
      eig = effective_eig_[j];
    } else if (design_.variant == Variant::kAmsGrad) {
      eig = linalg::eigh(b);
      const auto& maxima = state_.ams_eigmax[j];
      for (std::size_t i = 0; i < eig.eigvals.size(); ++i)
        eig.eigvals[i] = std::max(eig.eigvals[i], maxima[i]);
    } else {
      eig = linalg::eigh(b);
    }

    std::vector<double> s =
        linalg::inv_sqrt_spectrum(eig, design_.delta, b.max_abs());
    for (double& si : s) si *= alpha;
    if (bounds) clipping::clip_spectrum(s, *bounds);

    const std::size_t n = partition_.group_size(j);
    std::vector<double> mj = grouping::gather_block(state_.m, partition_, j);
    // U diag(s) Uᵀ m, without forming the preconditioner matrix.
    std::vector<double> tmp(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += eig.eigvecs(i, k) * mj[i];
      tmp[k] = acc * s[k];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += eig.eigvecs(i, k) * tmp[k];
      const std::size_t idx = partition_.flat_index(j, i);
      x[idx] -= acc;
      if (!std::isfinite(x[idx]))
        throw NumericalError("apply_update: non-finite parameter in group " +
                             std::to_string(j) + " (step-size blow-up?)");
    }
    if (applied_spectrum) (*applied_spectrum)[j] = std::move(s);
  });
}

void BlockOptimizer::step(std::span<double> x, std::span<const double> g, double alpha,
                          const clipping::ClipBounds* bounds,
                          std::vector<std::vector<double>>* applied_spectrum) {
  if (!(alpha > 0.0)) throw std::invalid_argument("step: alpha must be positive");
  advance(g);
  apply_update(x, alpha, bounds, applied_spectrum);
}

BlockDiagMatrix BlockOptimizer::effective_second_moment() const {
  if (design_.variant != Variant::kAmsGrad) return state_.second_moment;
  BlockDiagMatrix out = BlockDiagMatrix::zeros(partition_);
  for (std::size_t j = 0; j < partition_.group_count(); ++j) {
    if (j < effective_eig_.size() && !effective_eig_[j].eigvals.empty()) {
      out.blocks[j] = linalg::from_spectrum(effective_eig_[j], effective_eig_[j].eigvals);
    } else {
      linalg::EigDecomp eig = linalg::eigh(state_.second_moment.blocks[j]);
      const auto& maxima = state_.ams_eigmax[j];
      for (std::size_t i = 0; i < eig.eigvals.size(); ++i)
        eig.eigvals[i] = std::max(eig.eigvals[i], maxima[i]);
      out.blocks[j] = linalg::from_spectrum(eig, eig.eigvals);
    }
  }
  return out;
}

void BlockOptimizer::restore(OptimizerState state) {
  if (state.m.size() != partition_.total())
    throw std::invalid_argument("restore: first moment length mismatch");
  if (state.second_moment.blocks.size() != partition_.group_count())
    throw std::invalid_argument("restore: block count mismatch");
  for (std::size_t j = 0; j < partition_.group_count(); ++j)
    if (state.second_moment.blocks[j].dim() != partition_.group_size(j))
      throw std::invalid_argument("restore: block size mismatch");
  const bool wants_ams = design_.variant == Variant::kAmsGrad;
  if (wants_ams != !state.ams_eigmax.empty())
    throw std::invalid_argument("restore: AMSGrad maxima presence mismatch");
  state_ = std::move(state);
  state_.second_moment.partition = partition_;
  effective_eig_.clear();
}

DiagonalOptimizer::DiagonalOptimizer(Design design, std::size_t dim,
                                     std::optional<double> epsilon)
    : design_(design), epsilon_(epsilon.value_or(design.delta)) {
  design_.validate();
  if (dim == 0) throw std::invalid_argument("DiagonalOptimizer: empty dimension");
  if (!(epsilon_ > 0.0))
    throw std::invalid_argument("DiagonalOptimizer: epsilon must be positive");
  m_.assign(dim, 0.0);
  v_.assign(dim, 0.0);
  if (design_.variant == Variant::kAmsGrad) v_ams_.assign(dim, 0.0);
}

std::span<const double> DiagonalOptimizer::v_hat() const {
  if (design_.variant == Variant::kAmsGrad) return v_ams_;
  if (design_.variant == Variant::kSgd) return {};
  return v_;
}

void DiagonalOptimizer::advance(std::span<const double> g) {
  const std::size_t d = m_.size();
  if (g.size() != d) throw std::invalid_argument("advance: gradient length mismatch");
  for (std::size_t i = 0; i < d; ++i)
    if (!std::isfinite(g[i]))
      throw NumericalError("advance: non-finite gradient entry at index " +
                           std::to_string(i));

  t_ += 1;
  const double b1 = design_.beta1_at(t_);
  for (std::size_t i = 0; i < d; ++i) m_[i] = b1 * m_[i] + (1.0 - b1) * g[i];

  const double td = static_cast<double>(t_);
  switch (design_.variant) {
    case Variant::kAdaGrad:
    case Variant::kAdaFom:
      for (std::size_t i = 0; i < d; ++i)
        v_[i] = ((td - 1.0) * v_[i] + g[i] * g[i]) / td;
      break;
    case Variant::kRmsProp:
    case Variant::kAdam:
      for (std::size_t i = 0; i < d; ++i)
        v_[i] = design_.beta2 * v_[i] + (1.0 - design_.beta2) * g[i] * g[i];
      break;
    case Variant::kAmsGrad:
      for (std::size_t i = 0; i < d; ++i) {
        v_[i] = design_.beta2 * v_[i] + (1.0 - design_.beta2) * g[i] * g[i];
        v_ams_[i] = std::max(v_ams_[i], v_[i]);
      }
      break;
    case Variant::kSgd:
      break;
  }
}

void DiagonalOptimizer::apply_update(std::span<double> x, double alpha) {
  const std::size_t d = m_.size();
  if (x.size() != d) throw std::invalid_argument("apply_update: parameter length mismatch");
  if (design_.variant == Variant::kSgd) {
    for (std::size_t i = 0; i < d; ++i) x[i] -= alpha * m_[i];
    return;
  }
  const std::span<const double> vh = v_hat();
  for (std::size_t i = 0; i < d; ++i) {
    x[i] -= alpha * m_[i] / (std::sqrt(vh[i]) + epsilon_);
    if (!std::isfinite(x[i]))
      throw NumericalError("apply_update: non-finite parameter at index " +
                           std::to_string(i));
  }
}

void DiagonalOptimizer::step(std::span<double> x, std::span<const double> g,
                             double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("step: alpha must be positive");
  advance(g);
  apply_update(x, alpha);
}

void DiagonalOptimizer::restore(std::uint64_t t, std::vector<double> m,
                                std::vector<double> v, std::vector<double> v_ams) {
  if (m.size() != m_.size() || v.size() != v_.size() || v_ams.size() != v_ams_.size())
    throw std::invalid_argument("restore: state length mismatch");
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
  v_ams_ = std::move(v_ams);
}

DenseOptimizer::DenseOptimizer(Design design, std::size_t dim)
    : design_(design), v_(dim) {
  design_.validate();
  if (dim == 0 || dim > kMaxDim)
    throw std::invalid_argument("DenseOptimizer: dimension must be in [1, " +
                                std::to_string(kMaxDim) + "] (reference use only)");
  m_.assign(dim, 0.0);
  if (design_.variant == Variant::kAmsGrad) ams_eigmax_.assign(dim, 0.0);
}

void DenseOptimizer::step(std::span<double> x, std::span<const double> g,
                          double alpha) {
  const std::size_t d = m_.size();
  if (x.size() != d || g.size() != d)
    throw std::invalid_argument("step: dimension mismatch");
  for (std::size_t i = 0; i < d; ++i)
    if (!std::isfinite(g[i]))
      throw NumericalError("step: non-finite gradient entry at index " +
                           std::to_string(i));

  t_ += 1;
  const double b1 = design_.beta1_at(t_);
  for (std::size_t i = 0; i < d; ++i) m_[i] = b1 * m_[i] + (1.0 - b1) * g[i];

  if (design_.variant == Variant::kSgd) {
    for (std::size_t i = 0; i < d; ++i) x[i] -= alpha * m_[i];
    return;
  }

  const double td = static_cast<double>(t_);
  linalg::SymMatrix effective(d);
  switch (design_.variant) {
    case Variant::kAdaGrad:
    case Variant::kAdaFom:
      v_.scale(td - 1.0);
      v_.add_scaled_outer(g, 1.0);
      v_.scale(1.0 / td);
      effective = v_;
      break;
    case Variant::kRmsProp:
    case Variant::kAdam:
      v_.scale(design_.beta2);
      v_.add_scaled_outer(g, 1.0 - design_.beta2);
      effective = v_;
      break;
    case Variant::kAmsGrad: {
      v_.scale(design_.beta2);
      v_.add_scaled_outer(g, 1.0 - design_.beta2);
      linalg::EigDecomp eig = linalg::eigh(v_);
      for (std::size_t i = 0; i < d; ++i)
        ams_eigmax_[i] = std::max(ams_eigmax_[i], eig.eigvals[i]);
      effective = linalg::from_spectrum(eig, ams_eigmax_);
      break;
    }
    case Variant::kSgd:
      break;
  }

  const linalg::SymMatrix precond = linalg::inv_sqrt_shift(effective, design_.delta);
  std::vector<double> upd(d);
  precond.matvec(m_, upd);
  for (std::size_t i = 0; i < d; ++i) {
    x[i] -= alpha * upd[i];
    if (!std::isfinite(x[i]))
      throw NumericalError("step: non-finite parameter at index " + std::to_string(i));
  }
}

namespace {

void put_u64(std::string& buf, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) buf.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void put_f64(std::string& buf, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(buf, bits);
}

class Reader {
 public:
  Reader(std::string data, std::string path)
      : data_(std::move(data)), path_(std::move(path)) {}

  std::string take(std::size_t n) {
    if (pos_ + n > data_.size())
      throw DataError("checkpoint " + path_ + ": truncated (expected at least " +
                      std::to_string(pos_ + n) + " bytes, have " +
                      std::to_string(data_.size()) + ")");
    std::string out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint64_t u64() {
    const std::string b = take(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[k])) << (8 * k);
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

  void expect_end() {
    if (pos_ != data_.size())
      throw DataError("checkpoint " + path_ + ": trailing bytes after payload");
  }

 private:
  std::string data_;
  std::string path_;
  std::size_t pos_ = 0;
};

void write_file(const std::filesystem::path& path, const std::string& buf) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("checkpoint: cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw DataError("checkpoint: short write to " + path.string());
}

Reader read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Reader(std::move(data), path.string());
}

constexpr std::size_t kMagicLen = 9;

void put_header(std::string& buf, std::uint64_t t, std::uint64_t d,
                std::span<const std::size_t> sizes, std::span<const std::size_t> perm) {
  buf.append(kCheckpointMagic, kMagicLen);
  put_u64(buf, t);
  put_u64(buf, d);
  put_u64(buf, sizes.size());
  for (std::size_t n : sizes) put_u64(buf, n);
  buf.push_back(perm.empty() ? 0 : 1);
  for (std::size_t k : perm) put_u64(buf, k);
}

struct Header {
  std::uint64_t t = 0;
  std::uint64_t d = 0;
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> perm;
};

Header read_header(Reader& r, const std::filesystem::path& path) {
  const std::string magic = r.take(kMagicLen);
  if (magic != std::string(kCheckpointMagic, kMagicLen))
    throw DataError("checkpoint " + path.string() + ": bad magic \"" + magic + "\"");
  Header h;
  h.t = r.u64();
  h.d = r.u64();
  const std::uint64_t rr = r.u64();
  h.sizes.resize(rr);
  for (auto& n : h.sizes) n = r.u64();
  if (r.u8() != 0) {
    h.perm.resize(h.d);
    for (auto& k : h.perm) k = r.u64();
  }
  return h;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const BlockOptimizer& opt,
                     std::span<const double> x) {
  const auto& p = opt.partition();
  const auto& st = opt.state();
  if (x.size() != p.total())
    throw std::invalid_argument("save_checkpoint: parameter length mismatch");
  std::string buf;
  put_header(buf, st.t, p.total(), p.sizes(), p.perm());
  for (double v : st.m) put_f64(buf, v);
  for (const auto& b : st.second_moment.blocks)
    for (std::size_t i = 0; i < b.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j) put_f64(buf, b(i, j));
  buf.push_back(st.ams_eigmax.empty() ? 0 : 1);
  for (const auto& maxima : st.ams_eigmax)
    for (double v : maxima) put_f64(buf, v);
  for (double v : x) put_f64(buf, v);
  write_file(path, buf);
}

std::uint64_t load_checkpoint(const std::filesystem::path& path, BlockOptimizer& opt,
                              std::span<double> x) {
  Reader r = read_file(path);
  const Header h = read_header(r, path);
  const auto& p = opt.partition();
  if (h.d != p.total() || h.sizes.size() != p.group_count())
    throw DataError("checkpoint " + path.string() + ": partition shape mismatch");
  for (std::size_t j = 0; j < p.group_count(); ++j)
    if (h.sizes[j] != p.group_size(j))
      throw DataError("checkpoint " + path.string() + ": group size mismatch at " +
                      std::to_string(j));
  const std::vector<std::size_t> want_perm(p.perm().begin(), p.perm().end());
  if (h.perm != want_perm)
    throw DataError("checkpoint " + path.string() + ": permutation mismatch");
  if (x.size() != h.d)
    throw std::invalid_argument("load_checkpoint: parameter length mismatch");

  OptimizerState st;
  st.t = h.t;
  st.m.resize(h.d);
  for (auto& v : st.m) v = r.f64();
  st.second_moment = BlockDiagMatrix::zeros(p);
  for (std::size_t j = 0; j < p.group_count(); ++j) {
    const std::size_t n = h.sizes[j];
    std::vector<double> entries(n * n);
    for (auto& e : entries) e = r.f64();
    st.second_moment.blocks[j] = linalg::SymMatrix::from_rows(n, entries);
  }
  if (r.u8() != 0) {
    st.ams_eigmax.resize(p.group_count());
    for (std::size_t j = 0; j < p.group_count(); ++j) {
      st.ams_eigmax[j].resize(h.sizes[j]);
      for (auto& v : st.ams_eigmax[j]) v = r.f64();
    }
  }
  const bool wants_ams = opt.design().variant == Variant::kAmsGrad;
  if (wants_ams != !st.ams_eigmax.empty())
    throw DataError("checkpoint " + path.string() + ": design mismatch (AMSGrad maxima)");
  for (auto& v : x) v = r.f64();
  r.expect_end();
  opt.restore(std::move(st));
  return h.t;
}

void save_checkpoint(const std::filesystem::path& path, const DiagonalOptimizer& opt,
                     std::span<const double> x) {
  const std::size_t d = opt.m().size();
  if (x.size() != d)
    throw std::invalid_argument("save_checkpoint: parameter length mismatch");
  std::string buf;
  const std::vector<std::size_t> sizes(d, 1);
  put_header(buf, opt.t(), d, sizes, {});
  for (double v : opt.m()) put_f64(buf, v);
  for (double v : opt.v_raw()) put_f64(buf, v);
  const bool ams = opt.design().variant == Variant::kAmsGrad;
  buf.push_back(ams ? 1 : 0);
  if (ams)
    for (double v : opt.v_hat()) put_f64(buf, v);
  for (double v : x) put_f64(buf, v);
  write_file(path, buf);
}

std::uint64_t load_checkpoint(const std::filesystem::path& path,
                              DiagonalOptimizer& opt, std::span<double> x) {
  Reader r = read_file(path);
  const Header h = read_header(r, path);
  const std::size_t d = opt.m().size();
  if (h.d != d || h.sizes.size() != d || !h.perm.empty())
    throw DataError("checkpoint " + path.string() +
                    ": not a diagonal-state checkpoint of matching dimension");
  for (std::size_t n : h.sizes)
    if (n != 1)
      throw DataError("checkpoint " + path.string() + ": non-scalar group in diagonal state");
  if (x.size() != d)
    throw std::invalid_argument("load_checkpoint: parameter length mismatch");

  std::vector<double> m(d), v(d), v_ams;
  for (auto& e : m) e = r.f64();
  for (auto& e : v) e = r.f64();
  const bool has_ams = r.u8() != 0;
  const bool wants_ams = opt.design().variant == Variant::kAmsGrad;
  if (has_ams != wants_ams)
    throw DataError("checkpoint " + path.string() + ": design mismatch (AMSGrad maxima)");
  if (has_ams) {
    v_ams.resize(d);
    for (auto& e : v_ams) e = r.f64();
  }
  for (auto& e : x) e = r.f64();
  r.expect_end();
  opt.restore(h.t, std::move(m), std::move(v), std::move(v_ams));
  return h.t;
}

}  // namespace blockadapt::optim
