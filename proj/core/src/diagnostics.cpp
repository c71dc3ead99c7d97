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

#include "blockadapt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "blockadapt/errors.hpp"

namespace blockadapt::diagnostics {

double term_a(double alpha, const optim::BlockDiagMatrix& v, double delta,
              std::span<const double> g) {
  const auto& p = v.partition;
  if (g.size() != p.total())
    throw std::invalid_argument("term_a: gradient length does not match partition");
  double sum = 0.0;
  for (std::size_t j = 0; j < p.group_count(); ++j) {
    const auto gj = grouping::gather_block(g, p, j);
    const linalg::SymMatrix precond = linalg::inv_sqrt_shift(v.blocks[j], delta);
    std::vector<double> out(gj.size());
    precond.matvec(gj, out);
    for (double o : out) sum += (alpha * o) * (alpha * o);
  }
  return sum;
}

double term_b(double alpha_t, const optim::BlockDiagMatrix& v_t, double alpha_prev,
              const optim::BlockDiagMatrix& v_prev, double delta) {
  if (v_t.partition != v_prev.partition)
    throw std::invalid_argument("term_b: partitions differ between steps");
  double worst = 0.0;
  for (std::size_t j = 0; j < v_t.blocks.size(); ++j) {
    linalg::SymMatrix diff = linalg::inv_sqrt_shift(v_t.blocks[j], delta);
    diff.scale(alpha_t);
    linalg::SymMatrix prev = linalg::inv_sqrt_shift(v_prev.blocks[j], delta);
    diff.add_scaled(prev, -alpha_prev);
    worst = std::max(worst, linalg::spectral_norm(diff));
  }
  return worst;
}

double diag_term_a(double alpha, std::span<const double> v, double eps,
                   std::span<const double> g) {
  if (v.size() != g.size())
    throw std::invalid_argument("diag_term_a: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = alpha * g[i] / (std::sqrt(std::max(v[i], 0.0)) + eps);
    sum += s * s;
  }
  return sum;
}

double diag_term_b(double alpha_t, std::span<const double> v_t, double alpha_prev,
                   std::span<const double> v_prev, double eps) {
  if (v_t.size() != v_prev.size())
    throw std::invalid_argument("diag_term_b: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < v_t.size(); ++i) {
    const double cur = alpha_t / (std::sqrt(std::max(v_t[i], 0.0)) + eps);
    const double prev = alpha_prev / (std::sqrt(std::max(v_prev[i], 0.0)) + eps);
    sum += std::abs(cur - prev);
  }
  return sum;
}

double kappa_t(const optim::BlockDiagMatrix& v, double beta2, double delta) {
  const double sb2 = std::sqrt(beta2);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& block : v.blocks) {
    const linalg::EigDecomp eig = linalg::eigh(block);
    for (double lam : eig.eigvals) {
      const double s = sb2 * std::sqrt(std::max(lam, 0.0)) + delta;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
  return hi / lo;
}

double diag_kappa(std::span<const double> v, double beta2, double delta) {
  const double sb2 = std::sqrt(beta2);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double vi : v) {
    const double s = sb2 * std::sqrt(std::max(vi, 0.0)) + delta;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return v.empty() ? 1.0 : hi / lo;
}

double min_effective_spectrum(double alpha, const optim::BlockDiagMatrix& v,
                              double delta) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& block : v.blocks) {
    const linalg::EigDecomp eig = linalg::eigh(block);
    for (double lam : eig.eigvals)
      lo = std::min(lo, alpha / (std::sqrt(std::max(lam, 0.0)) + delta));
  }
  return lo;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> rows) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    out << r.t << ',' << fmt(r.loss) << ',' << fmt(r.grad_norm_sq) << ','
        << fmt(r.term_a) << ',' << fmt(r.term_b) << ',' << fmt(r.kappa_t) << ','
        << r.batch_size << ',' << fmt(r.wall_ms) << '\n';
  }
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader)
    throw DataError("trace: missing or unexpected header: \"" + line + "\"");
  std::vector<TraceRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 8)
      throw DataError("trace: expected 8 fields, got " + std::to_string(fields.size()) +
                      " in line \"" + line + "\"");
    TraceRecord r;
    r.t = std::stoull(fields[0]);
    r.loss = std::stod(fields[1]);
    r.grad_norm_sq = std::stod(fields[2]);
    r.term_a = std::stod(fields[3]);
    r.term_b = std::stod(fields[4]);
    r.kappa_t = std::stod(fields[5]);
    r.batch_size = std::stoull(fields[6]);
    r.wall_ms = std::stod(fields[7]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace blockadapt::diagnostics
