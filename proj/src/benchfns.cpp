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

#include "tcgp/benchfns.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "tcgp/error.hpp"

namespace tcgp {

namespace {

constexpr double kPi = std::numbers::pi;

double goldstein_price(const Point& x) {
  const double a = x[0];
  const double b = x[1];
  const double t1 = 1.0 + (a + b + 1.0) * (a + b + 1.0) *
                              (19.0 - 14.0 * a + 3.0 * a * a - 14.0 * b + 6.0 * a * b + 3.0 * b * b);
  const double t2 = 30.0 + (2.0 * a - 3.0 * b) * (2.0 * a - 3.0 * b) *
                               (18.0 - 32.0 * a + 12.0 * a * a + 48.0 * b - 36.0 * a * b + 27.0 * b * b);
  return t1 * t2;
}

double rosenbrock(const Point& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double u = x[i + 1] - x[i] * x[i];
    s += 100.0 * u * u + (x[i] - 1.0) * (x[i] - 1.0);
  }
  return s;
}

double ackley(const Point& x) {
  const double d = static_cast<double>(x.size());
  double sq = 0.0;
  double cs = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    sq += x[i] * x[i];
    cs += std::cos(2.0 * kPi * x[i]);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / d)) - std::exp(cs / d) + 20.0 + std::numbers::e;
}

double dixon_price(const Point& x) {
  double s = (x[0] - 1.0) * (x[0] - 1.0);
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    const double u = 2.0 * x[i] * x[i] - x[i - 1];
    s += static_cast<double>(i + 1) * u * u;
  }
  return s;
}

constexpr std::array<double, 4> kHartmannC = {1.0, 1.2, 3.0, 3.2};

constexpr double kHartmann3A[4][3] = {
    {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}};
constexpr double kHartmann3P[4][3] = {
    {3689, 1170, 2673}, {4699, 4387, 7470}, {1091, 8732, 5547}, {381, 5743, 8828}};

constexpr double kHartmann6A[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                                      {0.05, 10, 17, 0.1, 8, 14},
                                      {3, 3.5, 1.7, 10, 17, 8},
                                      {17, 8, 0.05, 10, 0.1, 14}};
constexpr double kHartmann6P[4][6] = {{1312, 1696, 5569, 124, 8283, 5886},
                                      {2329, 4135, 8307, 3736, 1004, 9991},
                                      {2348, 1451, 3522, 2883, 3047, 6650},
                                      {4047, 8828, 8732, 5743, 1091, 381}};

template <std::size_t D>
double hartmann(const Point& x, const double (&a)[4][D], const double (&p)[4][D]) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (std::size_t j = 0; j < D; ++j) {
      const double u = x[static_cast<Eigen::Index>(j)] - 1e-4 * p[i][j];
      inner += a[i][j] * u * u;
    }
    s += kHartmannC[i] * std::exp(-inner);
  }
  return -s;
}

double michalewicz(const Point& x) {
  constexpr int kM = 10;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double inner = std::sin(static_cast<double>(i + 1) * x[i] * x[i] / kPi);
    s += std::sin(x[i]) * std::pow(inner, 2 * kM);
  }
  return -s;
}

double cross_in_tray(const Point& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
  const double v = std::fabs(std::sin(x[0]) * std::sin(x[1]) * std::exp(std::fabs(100.0 - r / kPi)));
  return -0.0001 * std::pow(v + 1.0, 0.1);
}

constexpr std::array<double, 10> kShekelBeta = {0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};
constexpr double kShekelC[4][10] = {{4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
                                    {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6},
                                    {4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
                                    {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6}};

double shekel(const Point& x, int m) {
  double s = 0.0;
  for (int i = 0; i < m; ++i) {
    double inner = kShekelBeta[static_cast<std::size_t>(i)];
    for (int j = 0; j < 4; ++j) {
      const double u = x[j] - kShekelC[j][i];
      inner += u * u;
    }
    s += 1.0 / inner;
  }
  return -s;
}

double perm(const Point& x) {
  constexpr double kBetaP = 1.0;
  const Eigen::Index d = x.size();
  double s = 0.0;
  for (Eigen::Index i = 1; i <= d; ++i) {
    double inner = 0.0;
    for (Eigen::Index j = 1; j <= d; ++j) {
      const double jd = static_cast<double>(j);
      const double id = static_cast<double>(i);
      inner += (jd + kBetaP) * (std::pow(x[j - 1], id) - 1.0 / std::pow(jd, id));
    }
    s += inner * inner;
  }
  return s;
}

TestFunction build(std::string name, std::size_t dim, Box bounds, std::function<double(const Point&)> eval,
                   std::optional<double> known_min, std::string source) {
  return TestFunction{std::move(name), dim, std::move(bounds), std::move(eval), known_min, std::move(source)};
}

[[noreturn]] void unsupported(const std::string& name, std::size_t dim) {
  throw InputError("unsupported test function '" + name + "' with dim " + std::to_string(dim));
}

std::optional<double> michalewicz_min(std::size_t dim) {
  switch (dim) {
    case 2: return -1.8013;
    case 5: return -4.687658;
    case 10: return -9.66015;
    default: return std::nullopt;
  }
}

}  // namespace

TestFunction make_test_function(const std::string& name, std::size_t dim) {
  if (name == "goldstein_price") {
    if (dim != 2) unsupported(name, dim);
    return build(name, dim, Box::cube(2, -2.0, 2.0), goldstein_price, 3.0, "analytic");
  }
  if (name == "rosenbrock") {
    if (dim < 2) unsupported(name, dim);
    return build(name, dim, Box::cube(dim, -5.0, 10.0), rosenbrock, 0.0, "analytic");
  }
  if (name == "ackley") {
    if (dim < 1) unsupported(name, dim);
    return build(name, dim, Box::cube(dim, -32.768, 32.768), ackley, 0.0, "analytic");
  }
  if (name == "dixon_price") {
    if (dim < 1) unsupported(name, dim);
    return build(name, dim, Box::cube(dim, -10.0, 10.0), dixon_price, 0.0, "analytic");
  }
  if (name == "hartmann3" || name == "standard-hartmann3" || (name == "hartmann" && dim == 3)) {
    if (dim != 3) unsupported(name, dim);
    return build(name, dim, Box::cube(3, 0.0, 1.0),
                 [](const Point& x) { return hartmann(x, kHartmann3A, kHartmann3P); }, -3.86278, "reference");
  }
  if (name == "hartmann6" || (name == "hartmann" && dim == 6)) {
    if (dim != 6) unsupported(name, dim);
    return build(name, dim, Box::cube(6, 0.0, 1.0),
                 [](const Point& x) { return hartmann(x, kHartmann6A, kHartmann6P); }, -3.32237, "reference");
  }
  if (name == "michalewicz") {
    if (dim < 1) unsupported(name, dim);
    auto known = michalewicz_min(dim);
    return build(name, dim, Box::cube(dim, 0.0, kPi), michalewicz, known, known ? "reference" : "");
  }
  if (name == "cross_in_tray") {
    if (dim != 2) unsupported(name, dim);
    return build(name, dim, Box::cube(2, -10.0, 10.0), cross_in_tray, -2.06261, "reference");
  }
  if (name == "shekel5" || name == "shekel7" || name == "shekel10" || name == "shekel") {
    if (dim != 4) unsupported(name, dim);
    const int m = name == "shekel5" ? 5 : name == "shekel7" ? 7 : 10;
    const double known = m == 5 ? -10.1532 : m == 7 ? -10.4029 : -10.5364;
    return build(name, dim, Box::cube(4, 0.0, 10.0), [m](const Point& x) { return shekel(x, m); }, known,
                 "reference");
  }
  if (name == "perm") {
    if (dim < 1) unsupported(name, dim);
    const double h = static_cast<double>(dim);
    return build(name, dim, Box::cube(dim, -h, h), perm, 0.0, "analytic");
  }
  unsupported(name, dim);
}

std::vector<FunctionInfo> list_test_functions() {
  return {
      {"goldstein_price", {2}, 2, "[-2,2]^2"},
      {"rosenbrock", {}, 2, "[-5,10]^d"},
      {"ackley", {}, 1, "[-32.768,32.768]^d"},
      {"dixon_price", {}, 1, "[-10,10]^d"},
      {"hartmann3", {3}, 3, "[0,1]^3"},
      {"standard-hartmann3", {3}, 3, "[0,1]^3"},
      {"hartmann6", {6}, 6, "[0,1]^6"},
      {"michalewicz", {}, 1, "[0,pi]^d"},
      {"cross_in_tray", {2}, 2, "[-10,10]^2"},
      {"shekel5", {4}, 4, "[0,10]^4"},
      {"shekel7", {4}, 4, "[0,10]^4"},
      {"shekel10", {4}, 4, "[0,10]^4"},
      {"perm", {}, 1, "[-d,d]^d"},
  };
}

std::string bounds_manifest(const std::vector<std::pair<std::string, std::size_t>>& instances) {
  std::ostringstream os;
  char buf[64];
  auto print = [&](const std::vector<double>& v) {
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", v[i]);
      os << (i ? "," : "") << buf;
    }
    os << ']';
  };
  for (const auto& [name, dim] : instances) {
    const TestFunction f = make_test_function(name, dim);
    os << f.name << " d=" << f.dim << " lower=";
    print(f.bounds.lower());
    os << " upper=";
    print(f.bounds.upper());
    os << '\n';
  }
  return os.str();
}

}  // namespace tcgp
