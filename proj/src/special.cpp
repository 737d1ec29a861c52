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

#include "tcgp/special.hpp"

#include <cmath>
#include <limits>

#include "tcgp/error.hpp"

namespace tcgp::special {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEpsilon = 2.0 * std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_args(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InputError("incomplete gamma: shape must be positive");
  if (!(x >= 0.0)) throw InputError("incomplete gamma: argument must be nonnegative");
}

// log P(a, x) from the power series; accurate for x < a + 1.
double log_p_series(double a, double x) {
  double ap = a;
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (term < sum * kEpsilon) break;
  }
  return -x + a * std::log(x) - std::lgamma(a + 1.0) + std::log(sum);
}

// log Q(a, x) from the continued fraction; accurate for x >= a + 1.
double log_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return -x + a * std::log(x) - std::lgamma(a) + std::log(h);
}

double log1m_exp(double log_v) {
  // log(1 - exp(log_v)) for log_v <= 0
  if (log_v > -0.693147180559945309) return std::log(-std::expm1(log_v));
  return std::log1p(-std::exp(log_v));
}

}  // namespace

double log_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return kNegInf;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return log_p_series(a, x);
  return log1m_exp(log_q_fraction(a, x));
}

double log_gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return kNegInf;
  if (x < a + 1.0) return log1m_exp(log_p_series(a, x));
  return log_q_fraction(a, x);
}

double gamma_p(double a, double x) { return std::exp(log_gamma_p(a, x)); }

double gamma_q(double a, double x) { return std::exp(log_gamma_q(a, x)); }

double upper_gamma(double a, double x) { return std::exp(std::lgamma(a) + log_gamma_q(a, x)); }

double gamma_p_inverse(double a, double p, double q) {
  if (!(a > 0.0)) throw InputError("gamma_p_inverse: shape must be positive");
  if (!(p >= 0.0 && q >= 0.0) || std::fabs(p + q - 1.0) > 1e-12) {
    throw InputError("gamma_p_inverse: p and q must be complementary probabilities");
  }
  if (p == 0.0) return 0.0;
  if (q == 0.0) return std::numeric_limits<double>::infinity();

  // Root of an increasing function of y = log x, built on whichever tail is smaller.
  const bool lower_tail = p <= 0.5;
  const double log_target = lower_tail ? std::log(p) : std::log(q);
  auto residual = [&](double y) {
    const double x = std::exp(y);
    return lower_tail ? log_gamma_p(a, x) - log_target : log_target - log_gamma_q(a, x);
  };
  auto slope = [&](double y) {
    // d residual / dy = x * density(x) / tail(x)
    const double x = std::exp(y);
    const double log_density = (a - 1.0) * y - x - std::lgamma(a);
    const double log_tail = lower_tail ? log_gamma_p(a, x) : log_gamma_q(a, x);
    return std::exp(y + log_density - log_tail);
  };

  double y = std::log(std::max(a, 1.0));
  double y_lo = y;
  double y_hi = y;
  if (residual(y) > 0.0) {
    do {
      y_hi = y_lo;
      y_lo -= 4.0;
      if (y_lo < -700.0) return std::exp(y_lo);
    } while (residual(y_lo) > 0.0);
  } else {
    do {
      y_lo = y_hi;
      y_hi += 1.0;
      if (y_hi > 700.0) throw NumericalError("gamma_p_inverse: failed to bracket root");
    } while (residual(y_hi) < 0.0);
  }

  y = 0.5 * (y_lo + y_hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double r = residual(y);
    if (r == 0.0) break;
    if (r < 0.0) {
      y_lo = y;
    } else {
      y_hi = y;
    }
    const double s = slope(y);
    double next = (s > 0.0 && std::isfinite(s)) ? y - r / s : 0.5 * (y_lo + y_hi);
    if (!(next > y_lo && next < y_hi)) next = 0.5 * (y_lo + y_hi);
    const double step = std::fabs(next - y);
    y = next;
    if (step <= 1e-15 * std::max(1.0, std::fabs(y)) || y_hi - y_lo <= 1e-15 * std::max(1.0, std::fabs(y))) break;
  }
  return std::exp(y);
}

}  // namespace tcgp::special
