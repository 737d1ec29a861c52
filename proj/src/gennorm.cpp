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

#include "tcgp/gennorm.hpp"

#include <cmath>
#include <limits>

#include "tcgp/error.hpp"
#include "tcgp/special.hpp"

namespace tcgp {

namespace {

constexpr double kLogHalf = -0.693147180559945309417;

}  // namespace

void GnParams::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError("GnParams: beta must be positive");
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InputError("GnParams: scale must be nonnegative");
  if (!std::isfinite(loc)) throw InputError("GnParams: loc must be finite");
}

GnParams gaussian_gn() { return GnParams{2.0, 0.0, std::sqrt(2.0)}; }

double gn_pdf(double z, const GnParams& g) {
  g.validate();
  if (g.scale == 0.0) throw InputError("gn_pdf: point mass has no density");
  const double r = std::fabs(z - g.loc) / g.scale;
  return g.beta / (2.0 * std::tgamma(1.0 / g.beta) * g.scale) * std::exp(-std::pow(r, g.beta));
}

double gn_log_cdf(double z, const GnParams& g) {
  g.validate();
  if (g.scale == 0.0) return z >= g.loc ? 0.0 : -std::numeric_limits<double>::infinity();
  const double s = (z - g.loc) / g.scale;
  if (std::isinf(s)) return s > 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  const double a = 1.0 / g.beta;
  const double x = std::pow(std::fabs(s), g.beta);
  if (s >= 0.0) return kLogHalf + std::log1p(special::gamma_p(a, x));
  return kLogHalf + special::log_gamma_q(a, x);
}

double gn_cdf(double z, const GnParams& g) {
  g.validate();
  if (g.scale == 0.0) return z >= g.loc ? 1.0 : 0.0;
  const double s = (z - g.loc) / g.scale;
  if (std::isinf(s)) return s > 0 ? 1.0 : 0.0;
  const double a = 1.0 / g.beta;
  const double x = std::pow(std::fabs(s), g.beta);
  if (s >= 0.0) return 0.5 + 0.5 * special::gamma_p(a, x);
  return 0.5 * special::gamma_q(a, x);
}

double gn_quantile(double u, const GnParams& g) {
  g.validate();
  if (!(u > 0.0 && u < 1.0)) throw InputError("gn_quantile: u must lie in (0, 1)");
  if (g.scale == 0.0 || u == 0.5) return g.loc;
  const double a = 1.0 / g.beta;
  double x = 0.0;
  if (u > 0.5) {
    // P(a, x) = 2u - 1
    x = special::gamma_p_inverse(a, 2.0 * u - 1.0, 2.0 * (1.0 - u));
  } else {
    // Q(a, x) = 2u
    x = special::gamma_p_inverse(a, 1.0 - 2.0 * u, 2.0 * u);
  }
  const double s = std::pow(x, a);
  return u > 0.5 ? g.loc + g.scale * s : g.loc - g.scale * s;
}

double gn_variance(const GnParams& g) {
  g.validate();
  return g.scale * g.scale * std::exp(std::lgamma(3.0 / g.beta) - std::lgamma(1.0 / g.beta));
}

double gn_draw(const GnParams& g, Rng& rng) {
  if (g.scale == 0.0) return g.loc;
  const double magnitude = std::pow(rng.gamma(1.0 / g.beta), 1.0 / g.beta);
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return g.loc + sign * g.scale * magnitude;
}

std::vector<double> gn_sample(const GnParams& g, std::size_t n, Rng& rng) {
  g.validate();
  std::vector<double> out(n);
  for (auto& v : out) v = gn_draw(g, rng);
  return out;
}

double gamma_ei(double z, double lam, double beta) {
  if (!(lam >= 0.0)) throw InputError("gamma_ei: lam must be nonnegative");
  if (!(beta > 0.0)) throw InputError("gamma_ei: beta must be positive");
  if (lam == 0.0) return std::max(z, 0.0);
  const double s = z / lam;
  if (std::isinf(s)) return std::max(z, 0.0);
  const double a1 = 1.0 / beta;
  const double a2 = 2.0 / beta;
  const double x = std::pow(std::fabs(s), beta);
  const double log_c = std::log(lam) - std::log(2.0) - std::lgamma(a1);
  const double log_upper2 = std::lgamma(a2) + special::log_gamma_q(a2, x);
  if (s >= 0.0) {
    const double theta = 0.5 + 0.5 * special::gamma_p(a1, x);
    return z * theta + std::exp(log_c + log_upper2);
  }
  // z < 0: lam/(2 Gamma(a1)) * (Gamma(a2, x) - |s| Gamma(a1, x)); both terms
  // decay like e^-x, so take the difference relative to the larger one.
  const double log_upper1 = std::log(std::fabs(s)) + std::lgamma(a1) + special::log_gamma_q(a1, x);
  if (!std::isfinite(log_upper2)) return 0.0;
  const double v = -std::expm1(log_upper1 - log_upper2);
  return std::max(0.0, std::exp(log_c + log_upper2) * v);
}

double ucb_bound(const PredictiveMoments& pm, const GnParams& g, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("ucb_bound: eps must lie in (0, 1)");
  if (pm.sd == 0.0 || g.scale == 0.0) return pm.mean;
  const double q = gn_quantile(1.0 - eps, GnParams{g.beta, 0.0, 1.0});
  return pm.mean - q * g.scale * pm.sd;
}

double predictive_cdf(double z, const PredictiveMoments& pm, const GnParams& g) {
  return gn_cdf(z, GnParams{g.beta, pm.mean, g.scale * pm.sd});
}

double predictive_log_cdf(double z, const PredictiveMoments& pm, const GnParams& g) {
  return gn_log_cdf(z, GnParams{g.beta, pm.mean, g.scale * pm.sd});
}

}  // namespace tcgp
