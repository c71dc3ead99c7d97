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

#include "blockadapt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "blockadapt/errors.hpp"

namespace blockadapt::linalg {

SymMatrix SymMatrix::outer(std::span<const double> v) {
  SymMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, v[i] * v[j]);
  return m;
}

SymMatrix SymMatrix::symmetrized(const Matrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("SymMatrix: source matrix is not square");
  SymMatrix m(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return m;
}

SymMatrix SymMatrix::from_rows(std::size_t n, std::span<const double> entries) {
  if (entries.size() != n * n)
    throw std::invalid_argument("SymMatrix: expected n*n entries");
  Matrix a(n, n);
  std::copy(entries.begin(), entries.end(), a.data());
  return symmetrized(a);
}

void SymMatrix::scale(double c) {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) set(i, j, a_(i, j) * c);
}

void SymMatrix::add_scaled(const SymMatrix& other, double c) {
  if (other.dim() != n_)
    throw std::invalid_argument("SymMatrix::add_scaled: dimension mismatch");
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) set(i, j, a_(i, j) + c * other(i, j));
}

void SymMatrix::add_scaled_outer(std::span<const double> v, double c) {
  if (v.size() != n_)
    throw std::invalid_argument("SymMatrix::add_scaled_outer: dimension mismatch");
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) set(i, j, a_(i, j) + c * v[i] * v[j]);
}

void SymMatrix::matvec(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_)
    throw std::invalid_argument("SymMatrix::matvec: dimension mismatch");
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    const auto row = a_.row(i);
    for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

double SymMatrix::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) m = std::max(m, std::abs(a_(i, j)));
  return m;
}

double SymMatrix::frobenius() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) s += a_(i, j) * a_(i, j);
  return std::sqrt(s);
}

namespace {

double off_diag_frobenius(const Matrix& a) {
  double s = 0.0;
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

void check_finite(const SymMatrix& m, const char* op) {
  const std::size_t n = m.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      if (!std::isfinite(m(i, j)))
        throw NumericalError(std::string(op) + ": non-finite entry at (" +
                             std::to_string(i) + "," + std::to_string(j) + ")");
}

}  // namespace

EigDecomp eigh(const SymMatrix& m, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("eigh: tol must be positive");
  check_finite(m, "eigh");

  const std::size_t n = m.dim();
  if (n == 0) throw std::invalid_argument("eigh: empty matrix");
  if (n == 1) return {{m(0, 0)}, Matrix::identity(1)};

  Matrix a = m.dense();
  Matrix v = Matrix::identity(n);
  const double target = tol * m.frobenius();

  bool converged = false;
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (off_diag_frobenius(a) <= target) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(tau) > 1e154) {
          t = 1.0 / (2.0 * tau);
        } else {
          t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        const double app = a(p, p);
        const double aqq = a(q, q);
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(p, k) = a(k, p);
          a(k, q) = s * akp + c * akq;
          a(q, k) = a(k, q);
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged && off_diag_frobenius(a) > target)
    throw NumericalError("eigh: Jacobi sweeps exceeded " +
                         std::to_string(kMaxJacobiSweeps) +
                         " without converging (non-symmetric or ill-formed input?)");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  EigDecomp out;
  out.eigvals.resize(n);
  out.eigvecs = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigvals[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.eigvecs(i, j) = v(i, order[j]);
  }
  return out;
}

SymMatrix from_spectrum(const EigDecomp& basis, std::span<const double> vals) {
  const std::size_t n = basis.eigvals.size();
  if (vals.size() != n)
    throw std::invalid_argument("from_spectrum: spectrum size mismatch");
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += basis.eigvecs(i, k) * vals[k] * basis.eigvecs(j, k);
      m.set(i, j, acc);
    }
  }
  return m;
}

std::vector<double> inv_sqrt_spectrum(const EigDecomp& eig, double delta,
                                      double m_max_abs) {
  if (delta <= 0.0)
    throw std::invalid_argument("inv_sqrt_spectrum: delta must be positive");
  const double floor = -kPsdTol * m_max_abs;
  std::vector<double> s(eig.eigvals.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lam = eig.eigvals[i];
    if (lam < floor)
      throw NumericalError("inv_sqrt_spectrum: eigenvalue " + std::to_string(lam) +
                           " below PSD tolerance " + std::to_string(floor) +
                           " (corrupted accumulator)");
    s[i] = 1.0 / (std::sqrt(std::max(lam, 0.0)) + delta);
  }
  return s;
}

SymMatrix inv_sqrt_shift(const SymMatrix& m, double delta) {
  const EigDecomp eig = eigh(m);
  return from_spectrum(eig, inv_sqrt_spectrum(eig, delta, m.max_abs()));
}

double spectral_norm(const SymMatrix& m) {
  const EigDecomp eig = eigh(m);
  double s = 0.0;
  for (double lam : eig.eigvals) s = std::max(s, std::abs(lam));
  return s;
}

}  // namespace blockadapt::linalg
