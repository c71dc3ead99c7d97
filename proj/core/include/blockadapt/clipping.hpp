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
#include <span>

namespace blockadapt::clipping {

// Interval into which the preconditioner spectrum is projected.
struct ClipBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// Shrinking interval schedule around a target SGD rate alpha_star:
//
//   lower(t) = (1 - 1/(gamma t + 1)) * alpha_star
//   upper(t) = (1 + 1/(gamma t))     * alpha_star
//
// Both bounds converge to alpha_star; lower is non-decreasing and upper
// non-increasing, so the preconditioner collapses toward alpha_star * I
// and the update toward a plain SGD step.
class ClipSchedule {
 public:
  ClipSchedule(double gamma, double alpha_star);

  // t >= 1; t = 0 leaves upper undefined and is rejected.
  ClipBounds bounds(std::uint64_t t) const;

  double gamma() const { return gamma_; }
  double alpha_star() const { return alpha_star_; }

 private:
  double gamma_;
  double alpha_star_;
};

// Spectrum of the scaled preconditioner alpha (sqrt(lambda) + delta)^{-1}
// applied to eigenvalues of the accumulator (clamped to >= 0).
void effective_spectrum(std::span<const double> accum_eigvals, double alpha,
                        double delta, std::span<double> out);

// In-place projection of each spectrum entry into [bounds.lower, bounds.upper].
void clip_spectrum(std::span<double> spectrum, const ClipBounds& bounds);

}  // namespace blockadapt::clipping
