// Copyright 2026 The tcgp Authors
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

#ifndef TCGP_OPTIMIZE_HPP
#define TCGP_OPTIMIZE_HPP

#include <functional>

#include "tcgp/box.hpp"

namespace tcgp {

using ScalarFunction = std::function<double(const Point&)>;

struct OptimResult {
  Point x;
  double value = 0.0;
  int evaluations = 0;
};

struct NelderMeadOptions {
  int max_evaluations = 200;
  /// Stop once the spread of simplex values falls below this.
  double value_tolerance = 1e-6;
  /// Stop once every simplex edge is shorter than this (in coordinates).
  double point_tolerance = 1e-10;
  /// Initial simplex edge, as a fraction of the box width per coordinate.
  double initial_step = 0.1;
};

/// Minimize `f` over `bounds` with the Nelder-Mead simplex; every trial vertex
/// is projected into the box. Non-finite values are treated as +inf. The
/// returned value never exceeds f(x0).
OptimResult nelder_mead(const ScalarFunction& f, const Point& x0, const Box& bounds,
                        const NelderMeadOptions& options = {});

struct LocalAscentOptions {
  int max_iterations = 60;
  /// Finite-difference step, relative to the box width.
  double fd_step = 1e-6;
  /// Initial trial step length, relative to the box width.
  double initial_step = 0.05;
  double min_step = 1e-10;
};

/// Bound-constrained local maximization: projected steepest ascent with
/// central finite-difference gradients and backtracking. Only improving
/// moves are accepted, so result.value >= f(x0).
OptimResult local_maximize(const ScalarFunction& f, const Point& x0, const Box& bounds,
                           const LocalAscentOptions& options = {});

}  // namespace tcgp

#endif  // TCGP_OPTIMIZE_HPP
