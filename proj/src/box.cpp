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

#include "tcgp/box.hpp"

#include <cmath>

#include "tcgp/error.hpp"

namespace tcgp {

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size()) {
    throw InputError("Box: lower and upper must be nonempty and of equal length");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i])) {
      throw InputError("Box: degenerate or non-finite bounds in dimension " + std::to_string(i));
    }
  }
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  return Box(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
}

bool Box::contains(const Point& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
  }
  return true;
}

Point Box::clamp(const Point& x) const {
  Point y = x;
  for (std::size_t i = 0; i < dim(); ++i) y[i] = std::min(std::max(y[i], lower_[i]), upper_[i]);
  return y;
}

Point Box::reflect(const Point& x) const {
  Point y = x;
  for (std::size_t i = 0; i < dim(); ++i) {
    const double w = width(i);
    double v = y[i] - lower_[i];
    if (v < 0.0 || v > w) {
      // fold onto [0, 2w) then mirror the upper half
      v = std::fmod(v, 2.0 * w);
      if (v < 0.0) v += 2.0 * w;
      if (v > w) v = 2.0 * w - v;
    }
    y[i] = std::min(std::max(lower_[i] + v, lower_[i]), upper_[i]);
  }
  return y;
}

Point Box::sample(Rng& rng) const {
  Point x(dim());
  for (std::size_t i = 0; i < dim(); ++i) x[i] = rng.uniform(lower_[i], upper_[i]);
  return x;
}

Point Box::to_unit(const Point& x) const {
  Point u(dim());
  for (std::size_t i = 0; i < dim(); ++i) u[i] = (x[i] - lower_[i]) / width(i);
  return u;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= width(i);
  return v;
}

}  // namespace tcgp
