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

#ifndef TCGP_BO_HPP
#define TCGP_BO_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tcgp/calibration.hpp"
#include "tcgp/gennorm.hpp"
#include "tcgp/gp.hpp"
#include "tcgp/optimize.hpp"
#include "tcgp/rng.hpp"

namespace tcgp {

using Objective = std::function<double(const Point&)>;

/// Acquisition evaluated on a batch of points, one per row.
using BatchAcquisition = std::function<Eigen::VectorXd(const Eigen::MatrixXd&)>;

enum class Method { Gp, Tcgp, TcgpOcc, TcgpThres };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// Selection rule driving (beta, lambda) for a calibrated method.
SelectionRule default_rule(Method m);

struct Criterion {
  enum class Kind { Ei, Ucb };
  Kind kind = Kind::Ei;
  /// Tail level of the lower bound, only used by Ucb.
  double eps = 0.1;

  static Criterion ei() { return {}; }
  static Criterion ucb(double eps) { return {Kind::Ucb, eps}; }
  bool operator==(const Criterion&) const = default;
};

std::string to_string(const Criterion& c);

struct SmcOptions {
  int rounds = 15;
  int halve_every = 5;
  /// Initial mutation standard deviation relative to the box width.
  double initial_scale = 0.2;
  bool polish = true;
  LocalAscentOptions local;
};

/// Hyperparameters held fixed instead of refitted at every step.
struct FixedModel {
  double mean = 0.0;
  KernelParams kernel;
};

struct BoConfig {
  /// Total evaluation budget N_max, initial design included.
  int budget = 0;
  /// Initial design size n0; 0 selects 10 d.
  int initial = 0;
  double delta = 0.05;
  double p_min = 0.015;
  Method method = Method::Tcgp;
  /// Overrides default_rule(method) when set.
  std::optional<SelectionRule> rule;
  Criterion criterion;
  int particles = 1000;
  std::uint64_t seed = 0;
  ParamBox box;
  int regularity = 2;
  SelectOptions select;
  std::size_t grid_points = 512;
  SmcOptions smc;
  int mle_restarts = 5;
  std::optional<FixedModel> fixed_model;
  std::optional<double> w_max;
  bool record_timings = false;

  int initial_size(std::size_t dim) const;
  SelectionRule selection_rule() const;
  void validate(std::size_t dim) const;
};

struct PhaseTimes {
  double fit = 0.0;
  double calibrate = 0.0;
  double acquire = 0.0;
  double evaluate = 0.0;
};

struct RunRecord {
  enum class Kind { Initial, Iteration, Aborted };
  Kind kind = Kind::Initial;
  /// Number of evaluations once this record's point is included.
  int n = 0;
  Point x;
  double z = 0.0;
  /// Best response among the first n evaluations.
  double incumbent = 0.0;
  /// Iteration records only: threshold and residual law used to pick x.
  double threshold = 0.0;
  bool threshold_frozen = false;
  double beta = 0.0;
  double lambda = 0.0;
  double objective_value = 0.0;
  double acquisition_value = 0.0;
  bool acquisition_degenerate = false;
  std::optional<PhaseTimes> timings;
  std::string diagnostic;
};

std::string to_string(RunRecord::Kind k);

struct BoState {
  Dataset data;
  double incumbent;
  Point incumbent_x;
  ThresholdState threshold;
  Rng rng;
};

/// Everything the optimizer knew when choosing a point, passed to observers.
struct StepContext {
  const Dataset& data;  ///< D_n, before the new point is appended
  const GpModel& model;
  const GnParams& residual;
  double incumbent;     ///< m_n
  double threshold;     ///< t_n
};

using StepObserver = std::function<void(const StepContext&, const RunRecord&)>;

/// EI gamma(m_n - f_n(x), lambda sigma_n(x), beta); sigma_n below 1e-12 counts as 0.
double ei_value(const Point& x, const GpModel& gp, const GnParams& g, double m);

/// Batch acquisition to be maximized for the criterion: EI, or minus the lower bound.
BatchAcquisition make_acquisition(const GpModel& gp, const GnParams& g, double m, const Criterion& c);

struct AcquisitionResult {
  Point x;
  double value = 0.0;
  /// The acquisition was constant over every particle visited.
  bool degenerate = false;
};

/// SMC search (reweight by acq, systematic resampling, reflected Gaussian
/// Metropolis moves with a shrinking scale) followed by a local polish from
/// the best point seen.
AcquisitionResult maximize_acquisition(const BatchAcquisition& acq, const Box& bounds, int particles, Rng& rng,
                                       const SmcOptions& options = {});

BoState initial_state(const Objective& f, const Box& bounds, const BoConfig& config,
                      std::vector<RunRecord>* records = nullptr);

/// One optimizer iteration. Appends exactly one evaluation to state.data.
/// Throws NumericalError if f returns a non-finite value.
RunRecord bo_step(BoState& state, const BoConfig& config, const Objective& f, const StepObserver& observer = {});

/// Initial design followed by steps until the budget is spent. A non-finite
/// objective value ends the run with an Aborted record.
std::vector<RunRecord> run_bo(const Objective& f, const Box& bounds, const BoConfig& config,
                              const StepObserver& observer = {});

}  // namespace tcgp

#endif  // TCGP_BO_HPP
