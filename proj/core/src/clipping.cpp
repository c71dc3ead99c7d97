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

#include "blockadapt/clipping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blockadapt::clipping {

ClipSchedule::ClipSchedule(double gamma, double alpha_star)
    : gamma_(gamma), alpha_star_(alpha_star) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("ClipSchedule: gamma must be positive");
  if (!(alpha_star > 0.0))
    throw std::invalid_argument("ClipSchedule: alpha_star must be positive");
}

ClipBounds ClipSchedule::bounds(std::uint64_t t) const {
  if (t == 0) throw std::invalid_argument("ClipSchedule: t must be >= 1");
  const double td = static_cast<double>(t);
  return {(1.0 - 1.0 / (gamma_ * td + 1.0)) * alpha_star_,
          (1.0 + 1.0 / (gamma_ * td)) * alpha_star_};
}

void effective_spectrum(std::span<const double> accum_eigvals, double alpha,
                        double delta, std::span<double> out) {
  if (out.size() != accum_eigvals.size())
    throw std::invalid_argument("effective_spectrum: size mismatch");
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = alpha / (std::sqrt(std::max(accum_eigvals[i], 0.0)) + delta);
}

void clip_spectrum(std::span<double> spectrum, const ClipBounds& bounds) {
  for (double& s : spectrum) s = std::clamp(s, bounds.lower, bounds.upper);
}

}  // namespace blockadapt::clipping
