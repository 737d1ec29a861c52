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

#include "tcgp/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "tcgp/error.hpp"
#include "tcgp/optimize.hpp"

namespace tcgp {

namespace {

struct WeightedValue {
  double u;
  double w;
};

// sup over grid ∪ {u_i} of |a * G(u) - b * u|, with G(u) = sum_{u_i <= u} w_i / total.
// The left limits G(u_i-) are visited too.
double sup_deviation(std::vector<WeightedValue> values, double total, const UGrid& grid, double a, double b) {
  std::sort(values.begin(), values.end(), [](const WeightedValue& l, const WeightedValue& r) { return l.u < r.u; });
  double sup = 0.0;
  double cum = 0.0;
  std::size_t next = 0;
  auto visit = [&](double u) {
    while (next < values.size() && values[next].u < u) cum += values[next++].w;
    sup = std::max(sup, std::fabs(a * (cum / total) - b * u));
    while (next < values.size() && values[next].u <= u) cum += values[next++].w;
    sup = std::max(sup, std::fabs(a * (cum / total) - b * u));
  };
  std::size_t gi = 0;
  std::size_t vi = 0;
  while (gi < grid.points.size() || vi < values.size()) {
    if (vi >= values.size() || (gi < grid.points.size() && grid.points[gi] <= values[vi].u)) {
      visit(grid.points[gi++]);
    } else {
      visit(values[vi++].u);
    }
  }
  return sup;
}

// Quantities shared by every objective for one (beta, lambda).
struct TailSummary {
  std::vector<WeightedValue> below;  // (U_i, w_i) for Z_i <= t
  double p_hat = 0.0;                // sum of w_i 1{Z_i <= t}
  double mass = 0.0;                 // sum of w_i F_{-i}(t | X_i)
};

TailSummary summarize_tail(const LooTable& table, const GnParams& g, double t, const Weights& w) {
  if (w.size() != table.size()) throw InputError("calibration: weights and data differ in length");
  const GnParams residual{g.beta, 0.0, g.scale};
  TailSummary s;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double wi = w.normalized[static_cast<Eigen::Index>(i)];
    const double zi = table.responses[static_cast<Eigen::Index>(i)];
    const double log_ft = predictive_log_cdf(t, table.loo[i], residual);
    s.mass += wi * std::exp(log_ft);
    if (zi <= t) {
      if (!std::isfinite(log_ft)) {
        throw NumericalError("calibration: zero predictive mass below t at record " + std::to_string(i));
      }
      const double log_fz = predictive_log_cdf(zi, table.loo[i], residual);
      s.below.push_back({std::min(1.0, std::exp(log_fz - log_ft)), wi});
      s.p_hat += wi;
    }
  }
  return s;
}

void require_support(const TailSummary& s) {
  if (!(s.p_hat > 0.0)) throw InputError("calibration: no weighted mass at or below the threshold");
}

}  // namespace

// ---------------------------------------------------------------------------
// Weights

Weights Weights::uniform(std::size_t n) {
  if (n == 0) throw InputError("Weights: empty");
  return from_raw(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
}

Weights Weights::from_raw(Eigen::VectorXd raw) {
  if (raw.size() == 0) throw InputError("Weights: empty");
  if (!raw.allFinite() || (raw.array() < 0.0).any()) throw InputError("Weights: raw weights must be finite and >= 0");
  const double total = raw.sum();
  if (!(total > 0.0)) throw InputError("Weights: at least one raw weight must be positive");
  Weights w;
  w.normalized = raw / total;
  w.raw = std::move(raw);
  return w;
}

Weights kde_weights(const Dataset& data, const ReferenceMeasure& measure, std::optional<double> w_max) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n < 2) throw InputError("kde_weights: needs at least two records");
  if (measure.bounds.dim() != d) throw InputError("kde_weights: measure dimension mismatch");

  Eigen::MatrixXd u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) u.row(static_cast<Eigen::Index>(i)) = measure.bounds.to_unit(data.point(i)).transpose();

  const double factor = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(d) + 4.0));
  Eigen::VectorXd h(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < h.size(); ++j) {
    const double m = u.col(j).mean();
    const double sd = std::sqrt((u.col(j).array() - m).square().sum() / static_cast<double>(n - 1));
    h[j] = factor * (sd > 0.0 ? sd : 1.0);
  }
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(d)) / h.prod();

  Eigen::VectorXd raw(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    double density = 0.0;
    for (Eigen::Index k = 0; k < raw.size(); ++k) {
      const double q = ((u.row(i) - u.row(k)).transpose().array() / h.array()).matrix().squaredNorm();
      density += std::exp(-0.5 * q);
    }
    density *= norm / static_cast<double>(n);
    if (!(density > 0.0)) throw NumericalError("kde_weights: estimated density vanished at record " + std::to_string(i));
    // uniform reference density on the unit cube is 1
    raw[i] = 1.0 / density;
  }
  if (w_max) {
    if (!(*w_max > 0.0)) throw InputError("kde_weights: w_max must be positive");
    raw = raw.cwiseMin(*w_max);
  }
  return Weights::from_raw(std::move(raw));
}

// ---------------------------------------------------------------------------
// LOO PIT

LooTable LooTable::from_model(const GpModel& gp) {
  return LooTable{gp.responses(), gp.loo_all()};
}

double loo_cdf(const LooTable& table, std::size_t i, double z, const GnParams& g) {
  if (i >= table.size()) throw InputError("loo_cdf: index out of range");
  return predictive_cdf(z, table.loo[i], GnParams{g.beta, 0.0, g.scale});
}

std::vector<double> loo_tpit(const LooTable& table, const GnParams& g, double t) {
  const GnParams residual{g.beta, 0.0, g.scale};
  std::vector<double> u(table.size(), 1.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double zi = table.responses[static_cast<Eigen::Index>(i)];
    if (zi > t) continue;
    const double log_ft = predictive_log_cdf(t, table.loo[i], residual);
    if (!std::isfinite(log_ft)) {
      throw NumericalError("loo_tpit: zero predictive mass below t at record " + std::to_string(i));
    }
    u[i] = std::min(1.0, std::exp(predictive_log_cdf(zi, table.loo[i], residual) - log_ft));
  }
  return u;
}

std::vector<double> loo_tpit(const Dataset& data, const GpModel& gp, const GnParams& g, double t) {
  if (data.size() != gp.size()) throw InputError("loo_tpit: model was not fitted on this dataset");
  return loo_tpit(LooTable::from_model(gp), g, t);
}

UGrid UGrid::uniform(std::size_t count) {
  if (count < 2) throw InputError("UGrid: needs at least two points");
  UGrid grid;
  grid.points.resize(count);
  for (std::size_t k = 0; k < count; ++k) grid.points[k] = static_cast<double>(k) / static_cast<double>(count - 1);
  return grid;
}

double tks_pit(std::span<const double> u, const std::vector<bool>& below, const Weights& w, const UGrid& grid) {
  if (u.size() != below.size() || u.size() != w.size()) throw InputError("tks_pit: length mismatch");
  std::vector<WeightedValue> values;
  double total = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!below[i]) continue;
    const double wi = w.normalized[static_cast<Eigen::Index>(i)];
    values.push_back({u[i], wi});
    total += wi;
  }
  if (!(total > 0.0)) throw InputError("tks_pit: no weighted point below the threshold");
  return sup_deviation(std::move(values), total, grid, 1.0, 1.0);
}

double weighted_excursion(const Eigen::VectorXd& responses, const Weights& w, double t) {
  if (static_cast<std::size_t>(responses.size()) != w.size()) throw InputError("weighted_excursion: length mismatch");
  double p = 0.0;
  for (Eigen::Index i = 0; i < responses.size(); ++i) {
    if (responses[i] <= t) p += w.normalized[i];
  }
  return p;
}

// ---------------------------------------------------------------------------
// Occurrence

double occurrence_discrepancy(const LooTable& table, const GnParams& g, double t, const Weights& w) {
  if (table.size() < 2) throw InputError("occurrence_discrepancy: needs at least two records");
  const GnParams residual{g.beta, 0.0, g.scale};
  double p_hat = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double wi = w.normalized[static_cast<Eigen::Index>(i)];
    if (table.responses[static_cast<Eigen::Index>(i)] <= t) p_hat += wi;
    mass += wi * predictive_cdf(t, table.loo[i], residual);
  }
  return std::fabs(p_hat - mass);
}

double occurrence_discrepancy(const Dataset& data, const GpModel& gp, const GnParams& g, double t, const Weights& w) {
  if (data.size() != gp.size()) throw InputError("occurrence_discrepancy: model was not fitted on this dataset");
  return occurrence_discrepancy(LooTable::from_model(gp), g, t, w);
}

double kappa_hat(const LooTable& table, const GnParams& g, double t, const Weights& w) {
  const GnParams residual{g.beta, 0.0, g.scale};
  double p_hat = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double wi = w.normalized[static_cast<Eigen::Index>(i)];
    if (table.responses[static_cast<Eigen::Index>(i)] <= t) p_hat += wi;
    mass += wi * predictive_cdf(t, table.loo[i], residual);
  }
  if (!(p_hat > 0.0)) throw InputError("kappa_hat: no weighted mass at or below the threshold");
  return mass / p_hat;
}

double kappa_hat(const Dataset& data, const GpModel& gp, const GnParams& g, double t, const Weights& w) {
  if (data.size() != gp.size()) throw InputError("kappa_hat: model was not fitted on this dataset");
  return kappa_hat(LooTable::from_model(gp), g, t, w);
}

// ---------------------------------------------------------------------------
// Objectives

std::string to_string(SelectionRule rule) {
  switch (rule) {
    case SelectionRule::J0: return "J0";
    case SelectionRule::J1: return "J1";
    case SelectionRule::J2: return "J2";
    case SelectionRule::J3: return "J3";
    case SelectionRule::TksOnly: return "tks_only";
    case SelectionRule::OccOnly: return "occ_only";
  }
  return "J0";
}

SelectionRule selection_rule_from_string(const std::string& name) {
  if (name == "J0") return SelectionRule::J0;
  if (name == "J1") return SelectionRule::J1;
  if (name == "J2") return SelectionRule::J2;
  if (name == "J3") return SelectionRule::J3;
  if (name == "tks_only") return SelectionRule::TksOnly;
  if (name == "occ_only") return SelectionRule::OccOnly;
  throw InputError("unknown selection rule '" + name + "'");
}

double objective_j(const LooTable& table, const GnParams& g, double t, const Weights& w, const UGrid& grid,
                   SelectionRule rule) {
  TailSummary s = summarize_tail(table, g, t, w);
  require_support(s);
  const double kappa = s.mass / s.p_hat;
  const double r = std::fabs(s.p_hat - s.mass);
  const double total = s.p_hat;
  switch (rule) {
    case SelectionRule::J0: return sup_deviation(std::move(s.below), total, grid, 1.0, kappa);
    case SelectionRule::J1: return sup_deviation(std::move(s.below), total, grid, 1.0, 1.0) * r;
    case SelectionRule::J2: return sup_deviation(std::move(s.below), total, grid, 1.0 / kappa, 1.0);
    case SelectionRule::J3: return sup_deviation(std::move(s.below), total, grid, 1.0, 1.0 / kappa);
    case SelectionRule::TksOnly: return sup_deviation(std::move(s.below), total, grid, 1.0, 1.0);
    case SelectionRule::OccOnly: return r;
  }
  return 0.0;
}

double objective_j0_with_kappa(const LooTable& table, const GnParams& g, double t, const Weights& w,
                               const UGrid& grid, double kappa) {
  TailSummary s = summarize_tail(table, g, t, w);
  require_support(s);
  const double total = s.p_hat;
  return sup_deviation(std::move(s.below), total, grid, 1.0, kappa);
}

void ParamBox::validate() const {
  if (!(beta_lo > 0.0 && beta_lo < beta_hi && lambda_lo > 0.0 && lambda_lo < lambda_hi)) {
    throw InputError("ParamBox: need 0 < beta_lo < beta_hi and 0 < lambda_lo < lambda_hi");
  }
}

bool ParamBox::contains(double beta, double lambda) const {
  return beta >= beta_lo && beta <= beta_hi && lambda >= lambda_lo && lambda <= lambda_hi;
}

CalibResult select_params(const LooTable& table, double t, const Weights& w, const ParamBox& box,
                          SelectionRule rule, Rng& rng, const UGrid& grid, const SelectOptions& options) {
  box.validate();
  auto objective = [&](double beta, double lambda) {
    return objective_j(table, GnParams{beta, 0.0, lambda}, t, w, grid, rule);
  };

  double best_beta = 0.0;
  double best_lambda = 0.0;
  double best_value = std::numeric_limits<double>::infinity();
  auto consider = [&](double beta, double lambda) {
    const double v = objective(beta, lambda);
    if (v < best_value) {
      best_value = v;
      best_beta = beta;
      best_lambda = lambda;
    }
  };

  if (options.include_gaussian && box.contains(2.0, std::numbers::sqrt2)) consider(2.0, std::numbers::sqrt2);
  for (int k = 0; k < options.candidates; ++k) {
    const double beta = rng.uniform(box.beta_lo, box.beta_hi);
    const double lambda = rng.uniform(box.lambda_lo, box.lambda_hi);
    consider(beta, lambda);
  }
  if (!std::isfinite(best_value)) throw NumericalError("select_params: objective not finite on any candidate");

  if (options.refine_evaluations > 0) {
    const Box search({box.beta_lo, box.lambda_lo}, {box.beta_hi, box.lambda_hi});
    NelderMeadOptions nm;
    nm.max_evaluations = options.refine_evaluations;
    nm.value_tolerance = options.refine_tolerance;
    nm.initial_step = 0.05;
    Point x0(2);
    x0 << best_beta, best_lambda;
    const OptimResult res = nelder_mead([&](const Point& x) { return objective(x[0], x[1]); }, x0, search, nm);
    if (res.value < best_value) {
      best_value = res.value;
      best_beta = res.x[0];
      best_lambda = res.x[1];
    }
  }
  return CalibResult{GnParams{best_beta, 0.0, best_lambda}, best_value, rule};
}

// ---------------------------------------------------------------------------
// Threshold

double empirical_quantile(const Eigen::VectorXd& responses, double delta) {
  if (responses.size() == 0) throw InputError("empirical_quantile: empty responses");
  if (!(delta > 0.0 && delta <= 1.0)) throw InputError("empirical_quantile: delta must lie in (0, 1]");
  std::vector<double> sorted(responses.data(), responses.data() + responses.size());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // ceil with a relative guard so that e.g. 0.3 * 10 selects the third value
  auto rank = static_cast<std::size_t>(std::ceil(delta * n * (1.0 - 1e-12)));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

ThresholdState update_threshold(ThresholdState state, const Dataset& data, const Weights& w) {
  if (data.size() == 0) throw InputError("update_threshold: empty dataset");
  if (!(state.delta > 0.0 && state.delta <= 1.0)) throw InputError("update_threshold: delta must lie in (0, 1]");
  if (!(state.p_min > 0.0)) throw InputError("update_threshold: p_min must be positive");
  const double candidate = empirical_quantile(data.responses(), state.delta);
  if (!state.initialized) {
    state.t = candidate;
    state.initialized = true;
    state.frozen = false;
    return state;
  }
  if (weighted_excursion(data.responses(), w, candidate) >= state.p_min) {
    state.t = candidate;
    state.frozen = false;
  } else {
    state.frozen = true;
  }
  return state;
}

}  // namespace tcgp
