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

#ifndef TCGP_BENCHFNS_HPP
#define TCGP_BENCHFNS_HPP

// Deterministic global-optimization benchmarks, addressable by name.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tcgp/box.hpp"

namespace tcgp {

struct TestFunction {
  std::string name;
  std::size_t dim = 0;
  Box bounds;
  std::function<double(const Point&)> eval;
  std::optional<double> known_min;
  /// "analytic" or "reference": where known_min comes from.
  std::string known_min_source;

  double operator()(const Point& x) const { return eval(x); }
};

/// Names: goldstein_price, rosenbrock, ackley, dixon_price, hartmann3,
/// hartmann6 (or hartmann with dim 3 / 6), standard-hartmann3, michalewicz,
/// cross_in_tray, shekel5, shekel7, shekel10 (shekel is shekel10), perm.
/// Throws InputError for an unsupported (name, dim) pair.
TestFunction make_test_function(const std::string& name, std::size_t dim);

struct FunctionInfo {
  std::string name;
  /// Empty when any dimension >= min_dim is accepted.
  std::vector<std::size_t> dims;
  std::size_t min_dim = 1;
  std::string domain;
};

std::vector<FunctionInfo> list_test_functions();

/// One line per (name, dim) instance: "<name> d=<dim> lower=[...] upper=[...]",
/// bounds printed with %.17g.
std::string bounds_manifest(const std::vector<std::pair<std::string, std::size_t>>& instances);

}  // namespace tcgp

#endif  // TCGP_BENCHFNS_HPP
