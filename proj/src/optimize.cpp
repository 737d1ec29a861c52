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

#include "tcgp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "tcgp/error.hpp"

namespace tcgp {

namespace {

double finite_or_inf(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

OptimResult nelder_mead(const ScalarFunction& f, const Point& x0, const Box& bounds,
                        const NelderMeadOptions& options) {
  const std::size_t d = bounds.dim();
  if (static_cast<std::size_t>(x0.size()) != d) throw InputError("nelder_mead: x0 dimension mismatch");

  int evals = 0;
  auto eval = [&](const Point& x) {
    ++evals;
    return finite_or_inf(f(x));
  };

  std::vector<Point> simplex;
  std::vector<double> values;
  simplex.reserve(d + 1);
  simplex.push_back(bounds.clamp(x0));
  values.push_back(eval(simplex[0]));
  for (std::size_t i = 0; i < d; ++i) {
    Point v = simplex[0];
    const double step = options.initial_step * bounds.width(i);
    // step away from whichever face is nearer
    v[i] = (v[i] + step <= bounds.upper(i)) ? v[i] + step : v[i] - step;
    v = bounds.clamp(v);
    simplex.push_back(v);
    values.push_back(eval(v));
  }

  std::vector<std::size_t> order(d + 1);
  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[d >= 1 ? d - 1 : 0];

    if (std::isfinite(values[worst]) && values[worst] - values[best] <= options.value_tolerance) break;
    double diameter = 0.0;
    for (std::size_t i = 0; i <= d; ++i) {
      diameter = std::max(diameter, (simplex[i] - simplex[best]).lpNorm<Eigen::Infinity>());
    }
    if (diameter <= options.point_tolerance) break;

    Point centroid = Point::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i <= d; ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(d);

    const Point reflected = bounds.clamp(centroid + (centroid - simplex[worst]));
    const double f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      const Point expanded = bounds.clamp(centroid + 2.0 * (centroid - simplex[worst]));
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Point contracted = outside ? bounds.clamp(centroid + 0.5 * (reflected - centroid))
                                     : bounds.clamp(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == best) continue;
      simplex[i] = bounds.clamp(simplex[best] + 0.5 * (simplex[i] - simplex[best]));
      values[i] = eval(simplex[i]);
      if (evals >= options.max_evaluations) break;
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= d; ++i) {
    if (values[i] < values[best]) best = i;
  }
  return OptimResult{simplex[best], values[best], evals};
}

OptimResult local_maximize(const ScalarFunction& f, const Point& x0, const Box& bounds,
                           const LocalAscentOptions& options) {
  const std::size_t d = bounds.dim();
  if (static_cast<std::size_t>(x0.size()) != d) throw InputError("local_maximize: x0 dimension mismatch");

  int evals = 0;
  auto eval = [&](const Point& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };

  Point x = bounds.clamp(x0);
  double fx = eval(x);
  double step = options.initial_step;

  for (int iter = 0; iter < options.max_iterations && step >= options.min_step; ++iter) {
    // gradient in unit-box coordinates
    Eigen::VectorXd grad(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
      const double h = options.fd_step * bounds.width(i);
      Point xp = x, xm = x;
      xp[i] = std::min(x[i] + h, bounds.upper(i));
      xm[i] = std::max(x[i] - h, bounds.lower(i));
      const double span = xp[i] - xm[i];
      grad[i] = span > 0.0 ? (eval(xp) - eval(xm)) / span * bounds.width(i) : 0.0;
      if (!std::isfinite(grad[i])) grad[i] = 0.0;
    }
    const double norm = grad.norm();
    if (!(norm > 0.0)) break;
    const Eigen::VectorXd direction = grad / norm;

    bool improved = false;
    while (step >= options.min_step) {
      Point trial = x;
      for (std::size_t i = 0; i < d; ++i) trial[i] += step * direction[i] * bounds.width(i);
      trial = bounds.clamp(trial);
      const double ft = eval(trial);
      if (ft > fx) {
        x = trial;
        fx = ft;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
    step = std::min(2.0 * step, 0.5);
  }
  return OptimResult{x, fx, evals};
}

}  // namespace tcgp
