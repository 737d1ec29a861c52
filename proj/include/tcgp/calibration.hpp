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

#ifndef TCGP_CALIBRATION_HPP
#define TCGP_CALIBRATION_HPP

// Lower-tail calibration of GN residual models: weighted leave-one-out
// thresholded PIT, occurrence diagnostics, the selection objectives, density
// ratio weights, and the threshold rule used by the optimizer.

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcgp/gennorm.hpp"
#include "tcgp/gp.hpp"
#include "tcgp/rng.hpp"

namespace tcgp {

struct Weights {
  Eigen::VectorXd raw;
  Eigen::VectorXd normalized;  ///< sums to one

  static Weights uniform(std::size_t n);
  /// Normalizes `raw`; entries must be nonnegative with at least one positive.
  static Weights from_raw(Eigen::VectorXd raw);
  std::size_t size() const { return static_cast<std::size_t>(raw.size()); }
};

/// Reference measure for calibration averages; only the uniform law on a box.
struct ReferenceMeasure {
  Box bounds;
};

/// Density-ratio weights w_i ~ 1 / nu_hat(X_i) with nu_hat a Gaussian KDE of
/// the design rescaled to the unit cube, diagonal Scott bandwidth
/// n^(-1/(d+4)) * sd_j. Optional clipping w_i <- min(w_i, w_max) of the raw
/// weights before renormalization.
Weights kde_weights(const Dataset& data, const ReferenceMeasure& measure, std::optional<double> w_max = std::nullopt);

/// Responses together with their leave-one-out predictive moments; the LOO
/// moments do not depend on (beta, lambda) and are computed once per model.
struct LooTable {
  Eigen::VectorXd responses;
  std::vector<PredictiveMoments> loo;

  static LooTable from_model(const GpModel& gp);
  std::size_t size() const { return loo.size(); }
};

/// F_{n,-i}(z | X_i) under the GN residual model g (loc ignored, fixed to 0).
double loo_cdf(const LooTable& table, std::size_t i, double z, const GnParams& g);

std::vector<double> loo_tpit(const LooTable& table, const GnParams& g, double t);
std::vector<double> loo_tpit(const Dataset& data, const GpModel& gp, const GnParams& g, double t);

/// Evaluation grid for suprema over u in [0, 1].
struct UGrid {
  std::vector<double> points;

  /// `count` equally spaced points from 0 to 1 inclusive.
  static UGrid uniform(std::size_t count = 512);
};

/// sup over (grid ∪ {u_i}) of |G(u) - u|, G the weighted empirical CDF of the
/// u_i with below_i set. Throws InputError when no weight lies below.
double tks_pit(std::span<const double> u, const std::vector<bool>& below, const Weights& w, const UGrid& grid);

double weighted_excursion(const Eigen::VectorXd& responses, const Weights& w, double t);

double occurrence_discrepancy(const LooTable& table, const GnParams& g, double t, const Weights& w);
double occurrence_discrepancy(const Dataset& data, const GpModel& gp, const GnParams& g, double t, const Weights& w);

double kappa_hat(const LooTable& table, const GnParams& g, double t, const Weights& w);
double kappa_hat(const Dataset& data, const GpModel& gp, const GnParams& g, double t, const Weights& w);

enum class SelectionRule { J0, J1, J2, J3, TksOnly, OccOnly };

std::string to_string(SelectionRule rule);
SelectionRule selection_rule_from_string(const std::string& name);

/// Calibration objective for a given (beta, lambda) in g:
///   J0       sup |G(u) - u kappa|
///   J1       tKS-PIT * r
///   J2       sup |G(u) / kappa - u|
///   J3       sup |G(u) - u / kappa|
///   TksOnly  tKS-PIT
///   OccOnly  r
double objective_j(const LooTable& table, const GnParams& g, double t, const Weights& w, const UGrid& grid,
                   SelectionRule rule);

/// Same as objective_j(J0) but with the occurrence ratio supplied by the
/// caller instead of estimated.
double objective_j0_with_kappa(const LooTable& table, const GnParams& g, double t, const Weights& w,
                               const UGrid& grid, double kappa);

struct ParamBox {
  double beta_lo = 0.1;
  double beta_hi = 10.0;
  double lambda_lo = 5e-3;
  double lambda_hi = 10.0;

  void validate() const;
  bool contains(double beta, double lambda) const;
};

struct SelectOptions {
  int candidates = 900;
  int refine_evaluations = 200;
  double refine_tolerance = 1e-6;
  /// Also evaluate the Gaussian point (2, sqrt 2) ahead of the random candidates.
  bool include_gaussian = true;
};

struct CalibResult {
  GnParams params;
  double objective_value = 0.0;
  SelectionRule rule = SelectionRule::J0;

  bool operator==(const CalibResult&) const = default;
};

/// Two-stage minimization of the objective over the box: uniform random
/// candidates, then simplex refinement from the best one.
CalibResult select_params(const LooTable& table, double t, const Weights& w, const ParamBox& box,
                          SelectionRule rule, Rng& rng, const UGrid& grid = UGrid::uniform(),
                          const SelectOptions& options = {});

/// Lower order statistic Z_(ceil(delta n)).
double empirical_quantile(const Eigen::VectorXd& responses, double delta);

struct ThresholdState {
  double t = 0.0;
  double delta = 0.05;
  double p_min = 0.015;
  /// Last update kept the previous threshold.
  bool frozen = false;
  bool initialized = false;
};

/// The first call sets t to the delta-quantile unconditionally; later calls
/// move t to the new quantile only when its weighted excursion frequency is
/// at least p_min.
ThresholdState update_threshold(ThresholdState state, const Dataset& data, const Weights& w);

}  // namespace tcgp

#endif  // TCGP_CALIBRATION_HPP
