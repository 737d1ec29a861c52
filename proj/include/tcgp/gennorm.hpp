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

#ifndef TCGP_GENNORM_HPP
#define TCGP_GENNORM_HPP

#include <cstddef>
#include <vector>

#include "tcgp/predictive.hpp"
#include "tcgp/rng.hpp"

namespace tcgp {

/// Generalized normal GN(beta, loc, scale), density proportional to
/// exp(-(|z - loc| / scale)^beta). beta = 2 is N(loc, scale^2 / 2), beta = 1
/// is Laplace. scale = 0 is the point mass at loc.
struct GnParams {
  double beta = 2.0;
  double loc = 0.0;
  double scale = 1.0;

  void validate() const;
  bool operator==(const GnParams&) const = default;
};

/// The residual model equivalent to the plain Gaussian predictive, GN(2, 0, sqrt 2).
GnParams gaussian_gn();

double gn_pdf(double z, const GnParams& g);
double gn_cdf(double z, const GnParams& g);
/// log of gn_cdf, finite wherever scale > 0, including deep lower tails.
double gn_log_cdf(double z, const GnParams& g);
double gn_quantile(double u, const GnParams& g);
double gn_variance(const GnParams& g);

/// i.i.d. draws: |Z - loc| / scale is Gamma(1/beta)^(1/beta) with a random sign.
std::vector<double> gn_sample(const GnParams& g, std::size_t n, Rng& rng);
double gn_draw(const GnParams& g, Rng& rng);

/// E[(a - Z)_+] for Z ~ GN(beta, l, lam) written as a function of z = a - l:
///   z * Theta_beta(z / lam) + lam / (2 Gamma(1/beta)) * Gamma(2/beta, |z / lam|^beta),
/// with Gamma(s, x) the unnormalized upper incomplete gamma, and max(z, 0) at lam = 0.
double gamma_ei(double z, double lam, double beta);

/// Lower confidence bound  mean - Theta_beta^{-1}(1 - eps) * scale * sd,
/// used for minimization. eps in (0, 1).
double ucb_bound(const PredictiveMoments& pm, const GnParams& g, double eps);

/// Predictive CDF of GN(beta, mean, scale * sd) with the point-mass
/// convention 1{z >= mean} when scale * sd == 0.
double predictive_cdf(double z, const PredictiveMoments& pm, const GnParams& g);
double predictive_log_cdf(double z, const PredictiveMoments& pm, const GnParams& g);

}  // namespace tcgp

#endif  // TCGP_GENNORM_HPP
