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

#ifndef TCGP_BOX_HPP
#define TCGP_BOX_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "tcgp/rng.hpp"

namespace tcgp {

using Point = Eigen::VectorXd;

/// Axis-aligned hyper-rectangle, lower[i] < upper[i] for every coordinate.
class Box {
 public:
  Box() = default;
  Box(std::vector<double> lower, std::vector<double> upper);

  static Box cube(std::size_t dim, double lo, double hi);

  std::size_t dim() const { return lower_.size(); }
  double lower(std::size_t i) const { return lower_[i]; }
  double upper(std::size_t i) const { return upper_[i]; }
  double width(std::size_t i) const { return upper_[i] - lower_[i]; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  bool contains(const Point& x) const;
  Point clamp(const Point& x) const;
  /// Mirror coordinates that left the box back inside it.
  Point reflect(const Point& x) const;
  Point sample(Rng& rng) const;
  Point to_unit(const Point& x) const;
  double volume() const;

  bool operator==(const Box&) const = default;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

}  // namespace tcgp

#endif  // TCGP_BOX_HPP
