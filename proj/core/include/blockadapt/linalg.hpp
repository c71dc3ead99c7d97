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

#include <cstddef>
#include <span>
#include <vector>

#include "blockadapt/matrix.hpp"

namespace blockadapt::linalg {

// Symmetric matrix. Stores the full square internally but every mutation
// writes both triangles, so a(i,j) == a(j,i) holds by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), a_(n, n) {}

  // v vᵀ
  static SymMatrix outer(std::span<const double> v);
  // (A + Aᵀ) / 2
  static SymMatrix symmetrized(const Matrix& a);
  // Row-major entries of the full square; symmetrized on build.
  static SymMatrix from_rows(std::size_t n, std::span<const double> entries);

  std::size_t dim() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }
  void set(std::size_t i, std::size_t j, double v) {
    a_(i, j) = v;
    a_(j, i) = v;
  }

  void scale(double c);
  // this += c * other
  void add_scaled(const SymMatrix& other, double c);
  // this += c * v vᵀ
  void add_scaled_outer(std::span<const double> v, double c);
  // y = M x
  void matvec(std::span<const double> x, std::span<double> y) const;

  double max_abs() const;
  double frobenius() const;
  const Matrix& dense() const { return a_; }

  bool operator==(const SymMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  Matrix a_;
};

// Eigendecomposition of a symmetric matrix. Column j of eigvecs pairs with
// eigvals[j]; eigvals are sorted non-increasing.
struct EigDecomp {
  std::vector<double> eigvals;
  Matrix eigvecs;
};

inline constexpr double kDefaultEighTol = 1e-13;
inline constexpr int kMaxJacobiSweeps = 50;

// Relative floor below which a negative eigenvalue of a nominally-PSD
// matrix is treated as corruption rather than rounding noise.
inline constexpr double kPsdTol = 1e-10;

// Cyclic Jacobi eigendecomposition. Sweeps until the off-diagonal
// Frobenius mass drops below tol * ||M||_F, at most kMaxJacobiSweeps.
// Throws NumericalError on non-finite input (naming the offending entry)
// or if the sweep cap is hit.
EigDecomp eigh(const SymMatrix& m, double tol = kDefaultEighTol);

// U diag(vals) Uᵀ over the basis of an existing decomposition.
SymMatrix from_spectrum(const EigDecomp& basis, std::span<const double> vals);

// Eigenvalues of M mapped to 1/(sqrt(lambda) + delta), with tiny negative
// lambdas clamped to zero. Throws NumericalError if an eigenvalue falls
// below -kPsdTol * ||M||_max (a corrupted accumulator).
std::vector<double> inv_sqrt_spectrum(const EigDecomp& eig, double delta,
                                      double m_max_abs);

// (M^{1/2} + delta I)^{-1} for PSD M, via eigh.
SymMatrix inv_sqrt_shift(const SymMatrix& m, double delta);

// Matrix 2-norm of a symmetric matrix: max |eigenvalue|.
double spectral_norm(const SymMatrix& m);

}  // namespace blockadapt::linalg
