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

#include "tcgp/bo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "tcgp/error.hpp"

namespace tcgp {

namespace {

constexpr double kSigmaFloor = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_design_point(const Dataset& data, const Point& x) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if ((data.point(i) - x).cwiseAbs().maxCoeff() == 0.0) return true;
  }
  return false;
}

// Systematic resampling of row indices proportional to w (w sums to one).
std::vector<Eigen::Index> systematic_resample(const Eigen::VectorXd& w, Rng& rng) {
  const Eigen::Index n = w.size();
  std::vector<Eigen::Index> out(static_cast<std::size_t>(n));
  const double start = rng.uniform() / static_cast<double>(n);
  double cum = w[0];
  Eigen::Index j = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = start + static_cast<double>(i) / static_cast<double>(n);
    while (u > cum && j + 1 < n) cum += w[++j];
    out[static_cast<std::size_t>(i)] = j;
  }
  return out;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::Gp: return "gp";
    case Method::Tcgp: return "tcgp";
    case Method::TcgpOcc: return "tcgp_occ";
    case Method::TcgpThres: return "tcgp_thres";
  }
  return "gp";
}

Method method_from_string(const std::string& name) {
  if (name == "gp") return Method::Gp;
  if (name == "tcgp") return Method::Tcgp;
  if (name == "tcgp_occ") return Method::TcgpOcc;
  if (name == "tcgp_thres") return Method::TcgpThres;
  throw InputError("unknown method '" + name + "'");
}

SelectionRule default_rule(Method m) {
  switch (m) {
    case Method::TcgpOcc: return SelectionRule::OccOnly;
    case Method::TcgpThres: return SelectionRule::TksOnly;
    default: return SelectionRule::J0;
  }
}

std::string to_string(const Criterion& c) {
  if (c.kind == Criterion::Kind::Ei) return "ei";
  std::ostringstream os;
  os << "ucb(" << c.eps << ")";
  return os.str();
}

std::string to_string(RunRecord::Kind k) {
  switch (k) {
    case RunRecord::Kind::Initial: return "initial";
    case RunRecord::Kind::Iteration: return "iteration";
    case RunRecord::Kind::Aborted: return "aborted";
  }
  return "initial";
}

int BoConfig::initial_size(std::size_t dim) const {
  return initial > 0 ? initial : 10 * static_cast<int>(dim);
}

SelectionRule BoConfig::selection_rule() const { return rule ? *rule : default_rule(method); }

void BoConfig::validate(std::size_t dim) const {
  if (dim == 0) throw InputError("BoConfig: zero-dimensional domain");
  const int n0 = initial_size(dim);
  if (n0 < 2) throw InputError("BoConfig: initial design needs at least two points");
  if (budget < n0) throw InputError("BoConfig: budget must be at least the initial design size");
  if (particles < 1) throw InputError("BoConfig: particles must be >= 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw InputError("BoConfig: delta must lie in (0, 1]");
  if (!(p_min > 0.0 && p_min <= 1.0)) throw InputError("BoConfig: p_min must lie in (0, 1]");
  if (criterion.kind == Criterion::Kind::Ucb && !(criterion.eps > 0.0 && criterion.eps < 1.0)) {
    throw InputError("BoConfig: ucb eps must lie in (0, 1)");
  }
  if (regularity < 1 || regularity > 10) throw InputError("BoConfig: regularity out of range");
  if (grid_points < 2) throw InputError("BoConfig: grid_points must be >= 2");
  if (mle_restarts < 1) throw InputError("BoConfig: mle_restarts must be >= 1");
  if (smc.rounds < 0 || smc.halve_every < 1 || !(smc.initial_scale > 0.0)) throw InputError("BoConfig: invalid SMC options");
  box.validate();
  if (fixed_model) fixed_model->kernel.validate(dim);
}

double ei_value(const Point& x, const GpModel& gp, const GnParams& g, double m) {
  const PredictiveMoments pm = gp.predict(x);
  const double sd = pm.sd < kSigmaFloor ? 0.0 : pm.sd;
  return gamma_ei(m - pm.mean, g.scale * sd, g.beta);
}

BatchAcquisition make_acquisition(const GpModel& gp, const GnParams& g, double m, const Criterion& c) {
  g.validate();
  if (c.kind == Criterion::Kind::Ucb) {
    const double q = gn_quantile(1.0 - c.eps, GnParams{g.beta, 0.0, 1.0});
    return [&gp, g, q](const Eigen::MatrixXd& pts) {
      const auto pm = gp.predict(pts);
      Eigen::VectorXd out(static_cast<Eigen::Index>(pm.size()));
      for (std::size_t i = 0; i < pm.size(); ++i) {
        const double sd = pm[i].sd < kSigmaFloor ? 0.0 : pm[i].sd;
        out[static_cast<Eigen::Index>(i)] = -(pm[i].mean - q * g.scale * sd);
      }
      return out;
    };
  }
  return [&gp, g, m](const Eigen::MatrixXd& pts) {
    const auto pm = gp.predict(pts);
    Eigen::VectorXd out(static_cast<Eigen::Index>(pm.size()));
    for (std::size_t i = 0; i < pm.size(); ++i) {
      const double sd = pm[i].sd < kSigmaFloor ? 0.0 : pm[i].sd;
      out[static_cast<Eigen::Index>(i)] = gamma_ei(m - pm[i].mean, g.scale * sd, g.beta);
    }
    return out;
  };
}

AcquisitionResult maximize_acquisition(const BatchAcquisition& acq, const Box& bounds, int particles, Rng& rng,
                                       const SmcOptions& options) {
  if (particles < 1) throw InputError("maximize_acquisition: particles must be >= 1");
  const Eigen::Index np = particles;
  const Eigen::Index d = static_cast<Eigen::Index>(bounds.dim());

  Eigen::MatrixXd cloud(np, d);
  for (Eigen::Index i = 0; i < np; ++i) cloud.row(i) = bounds.sample(rng).transpose();
  Eigen::VectorXd values = acq(cloud);

  Point best_x = cloud.row(0).transpose();
  double best = -std::numeric_limits<double>::infinity();
  double lowest = std::numeric_limits<double>::infinity();
  auto track = [&](const Eigen::MatrixXd& pts, const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) continue;
      lowest = std::min(lowest, v[i]);
      if (v[i] > best) {
        best = v[i];
        best_x = pts.row(i).transpose();
      }
    }
  };
  track(cloud, values);

  Eigen::VectorXd width(d);
  for (Eigen::Index j = 0; j < d; ++j) width[j] = bounds.width(static_cast<std::size_t>(j));

  for (int round = 0; round < options.rounds; ++round) {
    const double scale = options.initial_scale * std::ldexp(1.0, -(round / options.halve_every));
    const double shift = values.minCoeff() < 0.0 ? values.minCoeff() : 0.0;
    auto target = [shift](double v) { return std::isfinite(v) ? std::max(v - shift, 0.0) : 0.0; };

    Eigen::VectorXd w = values.unaryExpr(target);
    const double total = w.sum();
    if (total > 0.0) {
      w /= total;
    } else {
      w.setConstant(1.0 / static_cast<double>(np));
    }
    const auto idx = systematic_resample(w, rng);
    Eigen::MatrixXd next(np, d);
    Eigen::VectorXd next_values(np);
    for (Eigen::Index i = 0; i < np; ++i) {
      next.row(i) = cloud.row(idx[static_cast<std::size_t>(i)]);
      next_values[i] = values[idx[static_cast<std::size_t>(i)]];
    }

    Eigen::MatrixXd proposal(np, d);
    for (Eigen::Index i = 0; i < np; ++i) {
      Point y(d);
      for (Eigen::Index j = 0; j < d; ++j) y[j] = next(i, j) + scale * width[j] * rng.normal();
      proposal.row(i) = bounds.reflect(y).transpose();
    }
    const Eigen::VectorXd proposal_values = acq(proposal);
    track(proposal, proposal_values);
    for (Eigen::Index i = 0; i < np; ++i) {
      const double cur = target(next_values[i]);
      const double prop = target(proposal_values[i]);
      const bool accept = cur <= 0.0 ? prop >= cur : rng.uniform() * cur < prop;
      if (accept && std::isfinite(proposal_values[i])) {
        next.row(i) = proposal.row(i);
        next_values[i] = proposal_values[i];
      }
    }
    cloud = std::move(next);
    values = std::move(next_values);
  }

  AcquisitionResult result{best_x, best, !(best > lowest)};
  if (!std::isfinite(best)) {
    result.x = cloud.row(0).transpose();
    result.value = 0.0;
    result.degenerate = true;
    return result;
  }
  if (options.polish && !result.degenerate) {
    auto scalar = [&acq](const Point& x) {
      Eigen::MatrixXd one(1, x.size());
      one.row(0) = x.transpose();
      return acq(one)[0];
    };
    const OptimResult polished = local_maximize(scalar, best_x, bounds, options.local);
    if (polished.value >= best) {
      result.x = polished.x;
      result.value = polished.value;
    }
  }
  return result;
}

BoState initial_state(const Objective& f, const Box& bounds, const BoConfig& config, std::vector<RunRecord>* records) {
  config.validate(bounds.dim());
  Rng rng(config.seed);
  Dataset data(bounds);
  double incumbent = std::numeric_limits<double>::infinity();
  Point incumbent_x;
  const int n0 = config.initial_size(bounds.dim());
  for (int i = 0; i < n0; ++i) {
    const Point x = bounds.sample(rng);
    const double z = f(x);
    if (!std::isfinite(z)) throw NumericalError("objective returned a non-finite value in the initial design");
    data.add(x, z);
    if (z < incumbent) {
      incumbent = z;
      incumbent_x = x;
    }
    if (records) {
      RunRecord r;
      r.kind = RunRecord::Kind::Initial;
      r.n = i + 1;
      r.x = x;
      r.z = z;
      r.incumbent = incumbent;
      records->push_back(std::move(r));
    }
  }
  ThresholdState threshold;
  threshold.delta = config.delta;
  threshold.p_min = config.p_min;
  return BoState{std::move(data), incumbent, std::move(incumbent_x), threshold, rng};
}

RunRecord bo_step(BoState& state, const BoConfig& config, const Objective& f, const StepObserver& observer) {
  const Dataset& data = state.data;
  Rng fit_rng = state.rng.split();
  Rng calib_rng = state.rng.split();
  Rng acq_rng = state.rng.split();
  PhaseTimes times;

  auto start = Clock::now();
  std::optional<GpModel> model;
  if (config.fixed_model) {
    model.emplace(data, config.fixed_model->mean, config.fixed_model->kernel);
  } else {
    MleOptions mle;
    mle.restarts = config.mle_restarts;
    mle.seed = fit_rng.next_u64();
    model.emplace(fit_mle(data, config.regularity, mle));
  }
  times.fit = seconds_since(start);

  start = Clock::now();
  const Weights w = kde_weights(data, ReferenceMeasure{data.bounds()}, config.w_max);
  state.threshold = update_threshold(state.threshold, data, w);
  const double t = state.threshold.t;
  GnParams g = gaussian_gn();
  double objective_value = 0.0;
  if (config.method != Method::Gp) {
    const LooTable table = LooTable::from_model(*model);
    const CalibResult calib = select_params(table, t, w, config.box, config.selection_rule(), calib_rng,
                                            UGrid::uniform(config.grid_points), config.select);
    g = calib.params;
    objective_value = calib.objective_value;
  }
  times.calibrate = seconds_since(start);

  start = Clock::now();
  const BatchAcquisition acq = make_acquisition(*model, g, state.incumbent, config.criterion);
  AcquisitionResult next = maximize_acquisition(acq, data.bounds(), config.particles, acq_rng, config.smc);
  while (is_design_point(data, next.x)) {
    next.x = data.bounds().sample(acq_rng);
    next.degenerate = true;
  }
  times.acquire = seconds_since(start);

  start = Clock::now();
  const double z = f(next.x);
  times.evaluate = seconds_since(start);
  if (!std::isfinite(z)) throw NumericalError("objective returned a non-finite value at step " + std::to_string(data.size() + 1));

  RunRecord r;
  r.kind = RunRecord::Kind::Iteration;
  r.n = static_cast<int>(data.size()) + 1;
  r.x = next.x;
  r.z = z;
  r.incumbent = std::min(state.incumbent, z);
  r.threshold = t;
  r.threshold_frozen = state.threshold.frozen;
  r.beta = g.beta;
  r.lambda = g.scale;
  r.objective_value = objective_value;
  r.acquisition_value = next.value;
  r.acquisition_degenerate = next.degenerate;
  if (config.record_timings) r.timings = times;

  if (observer) observer(StepContext{data, *model, g, state.incumbent, t}, r);

  state.data.add(next.x, z);
  if (z < state.incumbent) {
    state.incumbent = z;
    state.incumbent_x = next.x;
  }
  return r;
}

std::vector<RunRecord> run_bo(const Objective& f, const Box& bounds, const BoConfig& config,
                              const StepObserver& observer) {
  std::vector<RunRecord> records;
  std::optional<BoState> state;
  try {
    state.emplace(initial_state(f, bounds, config, &records));
    while (static_cast<int>(state->data.size()) < config.budget) {
      records.push_back(bo_step(*state, config, f, observer));
    }
  } catch (const NumericalError& e) {
    RunRecord r;
    r.kind = RunRecord::Kind::Aborted;
    r.n = records.empty() ? 0 : records.back().n;
    r.incumbent = records.empty() ? 0.0 : records.back().incumbent;
    r.diagnostic = e.what();
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace tcgp
