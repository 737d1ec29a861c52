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

#ifndef TCGP_SPECIAL_HPP
#define TCGP_SPECIAL_HPP

// Incomplete gamma functions. Power series below x = a + 1, modified-Lentz
// continued fraction above; both evaluated in log space so that deep tails
// keep full relative precision instead of underflowing.

namespace tcgp::special {

/// log P(a, x), P the regularized lower incomplete gamma. a > 0, x >= 0.
double log_gamma_p(double a, double x);

/// log Q(a, x) = log(1 - P(a, x)).
double log_gamma_q(double a, double x);

double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Unnormalized upper incomplete gamma, Gamma(a, x) = Gamma(a) * Q(a, x).
double upper_gamma(double a, double x);

/// Smallest x >= 0 with P(a, x) = p, given both p and q = 1 - p so that
/// either tail can be targeted without cancellation. Relative tolerance 1e-14.
double gamma_p_inverse(double a, double p, double q);

}  // namespace tcgp::special

#endif  // TCGP_SPECIAL_HPP
