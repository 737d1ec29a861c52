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

#ifndef TCGP_METRICS_HPP
#define TCGP_METRICS_HPP

// Test-set diagnostics: threshold-weighted CRPS, direct tKS-PIT and
// occurrence estimators, and subset simulation of sublevel sets.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "tcgp/bo.hpp"
#include "tcgp/gennorm.hpp"
#include "tcgp/gp.hpp"
#include "tcgp/rng.hpp"

namespace tcgp {

/// twCRPS estimate with chaining v(y) = min(y, t) from forecast draws y:
///   (1/K) sum |v(y_l) - v(z)| - (1/(2K^2)) sum_l sum_r |v(y_l) - v(y_r)|.
double twcrps_from_samples(std::span<const double> draws, double z, double t);

/// Same estimator with K draws from the forecast GN law.
double twcrps(const GnParams& forecast, double z, double t, int draws, Rng& rng);

/// Mean twCRPS of the calibrated predictive over probe points with known responses.
double testset_twcrps(const GpModel& gp, const GnParams& g, double t, const Eigen::MatrixXd& probes,
                      const Eigen::VectorXd& responses, int draws, Rng& rng);

/// Closed-form CRPS of N(mean, sd^2) at z.
double gaussian_crps(double mean, double sd, double z);

struct ParticleCloud {
  Eigen::MatrixXd particles;  ///< one point per row
  Eigen::VectorXd values;     ///< f at each particle
  double level = 0.0;
  double log_p_estimate = 0.0;
  int stages = 0;
  /// Current MH proposal standard deviation relative to the box width.
  double proposal_scale = 0.3;

  std::size_t size() const { return static_cast<std::size_t>(particles.rows()); }
  double p_estimate() const;
};

struct SubsetOptions {
  int mh_sweeps = 10;
  /// Conditional probability targeted by each intermediate stage.
  double level_fraction = 0.5;
  int stage_cap = 200;
};

/// Estimates P(f(X) <= t) for X uniform on bounds and returns m particles
/// approximately distributed as X given f(X) <= t. A warm cloud from a higher
/// level continues from that level; otherwise the search starts cold.
ParticleCloud subset_simulate(const Objective& f, const Box& bounds, double t, int m, Rng& rng,
                              const std::optional<ParticleCloud>& warm = std::nullopt,
                              const SubsetOptions& options = {});

/// Exact KS distance sup |G_L(u) - u| between the empirical law of u and U(0, 1).
double ks_uniform(std::vector<double> u);

/// tKS-PIT over particles of a cloud below t, using the stored responses.
/// At most `max_points` particles are used (the first ones).
double testset_tkspit(const GpModel& gp, const GnParams& g, double t, const ParticleCloud& cloud,
                      std::size_t max_points = 900);

/// |mean indicator - mean mass| over paired entries.
double occurrence_gap(std::span<const double> masses, const std::vector<bool>& indicators);

/// Occurrence discrepancy over uniform probes with known responses.
double testset_occurrence(const GpModel& gp, const GnParams& g, double t, const Eigen::MatrixXd& probes,
                          const Eigen::VectorXd& responses);

/// Convenience overload evaluating f at every probe.
double testset_occurrence(const GpModel& gp, const GnParams& g, double t, const Eigen::MatrixXd& probes,
                          const Objective& f);

}  // namespace tcgp

#endif  // TCGP_METRICS_HPP
