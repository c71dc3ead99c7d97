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
#include <iosfwd>
#include <span>
#include <vector>

#include "blockadapt/optimizer.hpp"

namespace blockadapt::diagnostics {

// One diagnostic row per logged step.
struct TraceRecord {
  std::uint64_t t = 0;
  double loss = 0.0;
  double grad_norm_sq = 0.0;  // ||g||^2 on the minibatch
  double term_a = 0.0;
  double term_b = 0.0;
  double kappa_t = 1.0;
  std::size_t batch_size = 0;
  double wall_ms = 0.0;
};

// || alpha (V^{1/2} + delta I)^{-1} g ||^2, computed blockwise.
double term_a(double alpha, const optim::BlockDiagMatrix& v, double delta,
              std::span<const double> g);

// max_j || alpha_t P_t[j] - alpha_prev P_prev[j] ||_2 with
// P = (V^{1/2} + delta I)^{-1}: the largest change of the effective
// spectrum across blocks between consecutive steps.
double term_b(double alpha_t, const optim::BlockDiagMatrix& v_t, double alpha_prev,
              const optim::BlockDiagMatrix& v_prev, double delta);

// Diagonal counterpart of term_a: || alpha g / (sqrt(v) + eps) ||^2.
double diag_term_a(double alpha, std::span<const double> v, double eps,
                   std::span<const double> g);

// Diagonal counterpart of term_b: the l1 norm of the elementwise change of
// effective step sizes alpha / (sqrt(v) + eps).
double diag_term_b(double alpha_t, std::span<const double> v_t, double alpha_prev,
                   std::span<const double> v_prev, double eps);

// Condition number of beta2^{1/2} V^{1/2} + delta I over the whole block
// matrix: global max / global min of sqrt(beta2 * lambda) + delta across
// blocks. Equals 1 when V = 0.
double kappa_t(const optim::BlockDiagMatrix& v, double beta2, double delta);

// Diagonal counterpart over the elementwise accumulator.
double diag_kappa(std::span<const double> v, double beta2, double delta);

// Smallest eigenvalue of alpha (V^{1/2} + delta I)^{-1} across blocks:
// the per-trajectory floor of the effective spectrum.
double min_effective_spectrum(double alpha, const optim::BlockDiagMatrix& v,
                              double delta);

inline constexpr char kTraceHeader[] =
    "t,loss,grad_norm_sq,term_a,term_b,kappa_t,batch_size,wall_ms";

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> rows);
std::vector<TraceRecord> read_trace_csv(std::istream& in);

}  // namespace blockadapt::diagnostics
