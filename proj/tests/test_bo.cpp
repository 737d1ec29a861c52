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


#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "tcgp/benchfns.hpp"
#include "tcgp/bo.hpp"
#include "tcgp/error.hpp"
#include "tcgp/gennorm.hpp"
#include "tcgp/gp.hpp"
#include "tcgp/rng.hpp"

namespace {

using tcgp::BoConfig;
using tcgp::Box;
using tcgp::Dataset;
using tcgp::GnParams;
using tcgp::GpModel;
using tcgp::Method;
using tcgp::Point;
using tcgp::RunRecord;

const boost::math::normal kStdNormal;

double classical_ei(const tcgp::PredictiveMoments& pm, double m) {
  if (pm.sd < 1e-12) return std::max(m - pm.mean, 0.0);
  const double u = (m - pm.mean) / pm.sd;
  return (m - pm.mean) * boost::math::cdf(kStdNormal, u) + pm.sd * boost::math::pdf(kStdNormal, u);
}

double forrester(const Point& x) {
  const double v = 6.0 * x[0] - 2.0;
  return v * v * std::sin(12.0 * x[0] - 4.0);
}

double grid_min(const std::function<double(const Point&)>& f, int count) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= count; ++i) best = std::min(best, f(Point::Constant(1, static_cast<double>(i) / count)));
  return best;
}

Dataset sample_data(const tcgp::TestFunction& f, std::size_t n, std::uint64_t seed) {
  tcgp::Rng rng(seed);
  Dataset data(f.bounds);
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = f.bounds.sample(rng);
    data.add(x, f.eval(x));
  }
  return data;
}

GpModel fixed_gp(const Dataset& data, double rho) {
  const double var = (data.responses().array() - data.responses().mean()).square().mean();
  Eigen::VectorXd ls(static_cast<Eigen::Index>(data.dim()));
  for (std::size_t j = 0; j < data.dim(); ++j) ls[static_cast<Eigen::Index>(j)] = rho * data.bounds().width(j);
  return GpModel(data, data.responses().mean(), tcgp::KernelParams{var, ls, 2});
}

BoConfig small_config(Method method, int budget, int initial, std::uint64_t seed) {
  BoConfig c;
  c.method = method;
  c.budget = budget;
  c.initial = initial;
  c.seed = seed;
  c.particles = 200;
  c.select.candidates = 200;
  c.select.refine_evaluations = 60;
  c.mle_restarts = 2;
  return c;
}

// ---------------------------------------------------------------------------

TEST(EiValue, ZeroAtIncumbentDesignPoint) {
  const auto f = tcgp::make_test_function("goldstein_price", 2);
  const Dataset data = sample_data(f, 15, 3);
  const GpModel gp = fixed_gp(data, 0.3);
  Eigen::Index best = 0;
  data.responses().minCoeff(&best);
  for (const GnParams& g : {tcgp::gaussian_gn(), GnParams{0.6, 0.0, 3.0}}) {
    EXPECT_EQ(tcgp::ei_value(data.point(static_cast<std::size_t>(best)), gp, g, data.responses().minCoeff()), 0.0);
  }
}

TEST(EiValue, GaussianPointIsClassicalEi) {
  const auto f = tcgp::make_test_function("hartmann3", 3);
  tcgp::Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Dataset data = sample_data(f, 12 + 4 * static_cast<std::size_t>(trial), 40 + static_cast<std::uint64_t>(trial));
    const GpModel gp = fixed_gp(data, 0.2 + 0.1 * trial);
    const double m = data.responses().minCoeff();
    for (int k = 0; k < 200; ++k) {
      const Point x = f.bounds.sample(rng);
      const double expected = classical_ei(gp.predict(x), m);
      EXPECT_NEAR(tcgp::ei_value(x, gp, tcgp::gaussian_gn(), m), expected, 1e-10);
    }
  }
}

TEST(EiValue, NondecreasingInIncumbent) {
  const auto f = tcgp::make_test_function("goldstein_price", 2);
  const Dataset data = sample_data(f, 20, 5);
  const GpModel gp = fixed_gp(data, 0.25);
  tcgp::Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const Point x = f.bounds.sample(rng);
    double prev = 0.0;
    for (double m = -1e5; m <= 1e5; m += 997.0) {
      const double v = tcgp::ei_value(x, gp, GnParams{1.3, 0.0, 0.8}, m);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Acquisition, BatchMatchesPointwiseAndUcbReducesToGaussian) {
  const auto f = tcgp::make_test_function("goldstein_price", 2);
  const Dataset data = sample_data(f, 18, 9);
  const GpModel gp = fixed_gp(data, 0.3);
  const double m = data.responses().minCoeff();
  tcgp::Rng rng(4);
  Eigen::MatrixXd pts(100, 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) = f.bounds.sample(rng).transpose();
  const GnParams g{0.8, 0.0, 1.7};
  const Eigen::VectorXd ei = tcgp::make_acquisition(gp, g, m, tcgp::Criterion::ei())(pts);
  const double eps = 0.1;
  const Eigen::VectorXd ucb = tcgp::make_acquisition(gp, tcgp::gaussian_gn(), m, tcgp::Criterion::ucb(eps))(pts);
  const double q = boost::math::quantile(kStdNormal, 1.0 - eps);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    const Point x = pts.row(i).transpose();
    // summation order differs between the two paths; errors scale with the responses
    EXPECT_NEAR(ei[i], tcgp::ei_value(x, gp, g, m), 1e-13 * data.responses().cwiseAbs().maxCoeff());
    const auto pm = gp.predict(x);
    EXPECT_NEAR(ucb[i], -(pm.mean - q * pm.sd), 1e-10 * std::max(1.0, std::fabs(pm.mean)));
  }
}

// ---------------------------------------------------------------------------

TEST(MaximizeAcquisition, FindsQuadraticPeak) {
  const Box bounds({-1.0, 0.0, 2.0}, {1.0, 5.0, 3.0});
  const Eigen::Vector3d c(0.3, 4.2, 2.05);
  auto acq = [&c](const Eigen::MatrixXd& pts) {
    return Eigen::VectorXd(-(pts.rowwise() - c.transpose()).rowwise().squaredNorm());
  };
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    tcgp::Rng rng(seed);
    const auto res = tcgp::maximize_acquisition(acq, bounds, 500, rng);
    EXPECT_TRUE(bounds.contains(res.x));
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(res.x[j], c[j], 1e-3);
    EXPECT_FALSE(res.degenerate);
  }
}

TEST(MaximizeAcquisition, ConstantAcquisitionIsFlagged) {
  const Box bounds = Box::cube(2, 0.0, 1.0);
  auto acq = [](const Eigen::MatrixXd& pts) { return Eigen::VectorXd::Zero(pts.rows()).eval(); };
  tcgp::Rng rng(1);
  const auto res = tcgp::maximize_acquisition(acq, bounds, 100, rng);
  EXPECT_TRUE(bounds.contains(res.x));
  EXPECT_TRUE(res.degenerate);
  EXPECT_THROW(tcgp::maximize_acquisition(acq, bounds, 0, rng), tcgp::InputError);
}

TEST(MaximizeAcquisition, BeatsRandomProbesOnAckleyEi) {
  const auto f = tcgp::make_test_function("ackley", 4);
  int wins = 0;
  const int trials = 20;
  for (int trial = 0; trial < trials; ++trial) {
    const Dataset data = sample_data(f, 40, 100 + static_cast<std::uint64_t>(trial));
    const GpModel gp = fixed_gp(data, 0.15);
    const auto acq = tcgp::make_acquisition(gp, tcgp::gaussian_gn(), data.responses().minCoeff(), tcgp::Criterion::ei());
    tcgp::Rng rng(500 + static_cast<std::uint64_t>(trial));
    Eigen::MatrixXd probes(10000, 4);
    for (Eigen::Index i = 0; i < probes.rows(); ++i) probes.row(i) = f.bounds.sample(rng).transpose();
    const double probe_best = acq(probes).maxCoeff();
    const auto res = tcgp::maximize_acquisition(acq, f.bounds, 1000, rng);
    EXPECT_TRUE(f.bounds.contains(res.x));
    Eigen::MatrixXd at(1, 4);
    at.row(0) = res.x.transpose();
    EXPECT_DOUBLE_EQ(acq(at)[0], res.value);
    if (res.value >= probe_best) ++wins;
  }
  EXPECT_GE(wins, 19);
}

// ---------------------------------------------------------------------------

void expect_classical_driver_match(bool polish, double tol) {
  const auto f = tcgp::make_test_function("goldstein_price", 2);
  BoConfig config = small_config(Method::Gp, 30, 10, 77);
  config.smc.polish = polish;
  tcgp::BoState state = tcgp::initial_state(f.eval, f.bounds, config);
  for (int step = 0; step < 8; ++step) {
    // the same random streams, drawn in the same order, feeding a textbook EI
    tcgp::Rng rng = state.rng;
    tcgp::Rng fit_rng = rng.split();
    tcgp::Rng calib_rng = rng.split();
    tcgp::Rng acq_rng = rng.split();
    tcgp::MleOptions mle;
    mle.restarts = config.mle_restarts;
    mle.seed = fit_rng.next_u64();
    const GpModel gp = tcgp::fit_mle(state.data, config.regularity, mle);
    const double m = state.incumbent;
    auto classic = [&gp, m](const Eigen::MatrixXd& pts) {
      const auto pm = gp.predict(pts);
      Eigen::VectorXd out(pts.rows());
      for (Eigen::Index i = 0; i < pts.rows(); ++i) out[i] = classical_ei(pm[static_cast<std::size_t>(i)], m);
      return out;
    };
    const auto expected = tcgp::maximize_acquisition(classic, f.bounds, config.particles, acq_rng, config.smc);
    const RunRecord r = tcgp::bo_step(state, config, f.eval);
    EXPECT_LE((r.x - expected.x).cwiseAbs().maxCoeff(), tol) << "step " << step;
    if (!polish) EXPECT_NEAR(r.acquisition_value, expected.value, 1e-10 * std::max(1.0, expected.value)) << "step " << step;
    EXPECT_EQ(r.beta, 2.0);
    EXPECT_DOUBLE_EQ(r.lambda, std::numbers::sqrt2);
  }
}

TEST(BoStep, GpMethodMatchesClassicalEiDriver) {
  // particle stage alone: same candidate
  expect_classical_driver_match(false, 1e-12);
  // with the finite-difference polish the two agree to its resolution
  expect_classical_driver_match(true, 1e-5);
}

TEST(RunBo, BookkeepingAndIncumbent) {
  const auto f = tcgp::make_test_function("goldstein_price", 2);
  const BoConfig config = small_config(Method::Tcgp, 22, 12, 5);
  const auto records = tcgp::run_bo(f.eval, f.bounds, config);
  ASSERT_EQ(records.size(), 22u);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    EXPECT_EQ(r.n, static_cast<int>(i) + 1);
    EXPECT_EQ(r.kind, i < 12 ? RunRecord::Kind::Initial : RunRecord::Kind::Iteration);
    EXPECT_EQ(r.z, f.eval(r.x));
    EXPECT_TRUE(f.bounds.contains(r.x));
    const double prev = best;
    best = std::min(best, r.z);
    EXPECT_EQ(r.incumbent, best);
    EXPECT_LE(r.incumbent, prev);
    if (r.kind == RunRecord::Kind::Iteration) {
      EXPECT_TRUE(config.box.contains(r.beta, r.lambda));
      EXPECT_GE(r.objective_value, 0.0);
      EXPECT_FALSE(r.timings.has_value());
    }
  }
}

TEST(RunBo, StepAppendsExactlyOnePoint) {
  const auto f = tcgp::make_test_function("hartmann3", 3);
  const BoConfig config = small_config(Method::TcgpOcc, 40, 10, 6);
  tcgp::BoState state = tcgp::initial_state(f.eval, f.bounds, config);
  for (int k = 0; k < 3; ++k) {
    const std::size_t before = state.data.size();
    const double m = state.incumbent;
    const RunRecord r = tcgp::bo_step(state, config, f.eval);
    EXPECT_EQ(state.data.size(), before + 1);
    EXPECT_EQ(state.incumbent, std::min(m, r.z));
    EXPECT_EQ(f.eval(state.incumbent_x), state.incumbent);
  }
}

TEST(RunBo, BudgetEqualToInitialDesign) {
  const auto f = tcgp::make_test_function("goldstein_price", 2);
  const auto records = tcgp::run_bo(f.eval, f.bounds, small_config(Method::Tcgp, 20, 0, 1));
  ASSERT_EQ(records.size(), 20u);
  for (const auto& r : records) EXPECT_EQ(r.kind, RunRecord::Kind::Initial);
}

TEST(RunBo, DeterministicGivenSeed) {
  const auto f = tcgp::make_test_function("goldstein_price", 2);
  for (Method method : {Method::Gp, Method::Tcgp, Method::TcgpThres}) {
    BoConfig config = small_config(method, 18, 10, 31);
    if (method == Method::TcgpThres) config.criterion = tcgp::Criterion::ucb(0.2);
    const auto a = tcgp::run_bo(f.eval, f.bounds, config);
    const auto b = tcgp::run_bo(f.eval, f.bounds, config);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].x, b[i].x);
      EXPECT_EQ(a[i].z, b[i].z);
      EXPECT_EQ(a[i].beta, b[i].beta);
      EXPECT_EQ(a[i].lambda, b[i].lambda);
      EXPECT_EQ(a[i].threshold, b[i].threshold);
      EXPECT_EQ(a[i].acquisition_value, b[i].acquisition_value);
    }
  }
}

TEST(RunBo, NonFiniteObjectiveAborts) {
  const auto f = tcgp::make_test_function("goldstein_price", 2);
  int calls = 0;
  auto bad = [&](const Point& x) { return ++calls > 13 ? std::numeric_limits<double>::quiet_NaN() : f.eval(x); };
  const auto records = tcgp::run_bo(bad, f.bounds, small_config(Method::Gp, 20, 10, 2));
  ASSERT_EQ(records.size(), 14u);
  EXPECT_EQ(records.back().kind, RunRecord::Kind::Aborted);
  EXPECT_EQ(records.back().n, 13);
  EXPECT_FALSE(records.back().diagnostic.empty());

  calls = 0;
  auto bad_early = [&](const Point& x) { return ++calls > 4 ? std::numeric_limits<double>::infinity() : f.eval(x); };
  const auto early = tcgp::run_bo(bad_early, f.bounds, small_config(Method::Gp, 20, 10, 2));
  ASSERT_EQ(early.size(), 5u);
  EXPECT_EQ(early.back().kind, RunRecord::Kind::Aborted);
}

TEST(RunBo, ConfigValidation) {
  const Box b = Box::cube(2, 0.0, 1.0);
  auto f = [](const Point& x) { return x.sum(); };
  BoConfig c = small_config(Method::Tcgp, 10, 20, 1);
  EXPECT_THROW(tcgp::run_bo(f, b, c), tcgp::InputError);
  c = small_config(Method::Tcgp, 30, 10, 1);
  c.criterion = tcgp::Criterion::ucb(1.0);
  EXPECT_THROW(tcgp::run_bo(f, b, c), tcgp::InputError);
  c = small_config(Method::Tcgp, 30, 10, 1);
  c.particles = 0;
  EXPECT_THROW(tcgp::run_bo(f, b, c), tcgp::InputError);
  EXPECT_EQ(small_config(Method::Tcgp, 30, 0, 1).initial_size(3), 30);
}

TEST(Method, NamesAndDefaultRules) {
  for (Method m : {Method::Gp, Method::Tcgp, Method::TcgpOcc, Method::TcgpThres}) {
    EXPECT_EQ(tcgp::method_from_string(tcgp::to_string(m)), m);
  }
  EXPECT_EQ(tcgp::default_rule(Method::Tcgp), tcgp::SelectionRule::J0);
  EXPECT_EQ(tcgp::default_rule(Method::TcgpOcc), tcgp::SelectionRule::OccOnly);
  EXPECT_EQ(tcgp::default_rule(Method::TcgpThres), tcgp::SelectionRule::TksOnly);
  EXPECT_THROW(tcgp::method_from_string("ei"), tcgp::InputError);
}

// ---------------------------------------------------------------------------

BoConfig fixed_forrester_config(int budget, std::uint64_t seed) {
  BoConfig c;
  c.method = Method::Tcgp;
  c.budget = budget;
  c.initial = 5;
  c.seed = seed;
  c.particles = 300;
  c.fixed_model = tcgp::FixedModel{0.0, tcgp::KernelParams{36.0, Eigen::VectorXd::Constant(1, 0.15), 2}};
  return c;
}

TEST(RunBo, ConvergesOnSmoothOneDimensionalProblem) {
  const Box b = Box::cube(1, 0.0, 1.0);
  const double target = grid_min(forrester, 100000);
  const auto records = tcgp::run_bo(forrester, b, fixed_forrester_config(35, 3));
  ASSERT_EQ(records.back().kind, RunRecord::Kind::Iteration);
  EXPECT_LE(records.back().incumbent - target, 1e-2);
}

TEST(RunBo, TailMassBelowIncumbentVanishes) {
  const Box b = Box::cube(1, 0.0, 1.0);
  Eigen::MatrixXd probes(201, 1);
  for (Eigen::Index i = 0; i < probes.rows(); ++i) probes(i, 0) = static_cast<double>(i) / 200.0;
  std::vector<double> mass;
  auto observer = [&](const tcgp::StepContext& ctx, const RunRecord&) {
    const auto pm = ctx.model.predict(probes);
    double s = 0.0;
    for (const auto& p : pm) s += tcgp::predictive_cdf(ctx.incumbent, p, ctx.residual);
    mass.push_back(s / static_cast<double>(pm.size()));
  };
  tcgp::run_bo(forrester, b, fixed_forrester_config(45, 4), observer);
  ASSERT_EQ(mass.size(), 40u);
  EXPECT_LE(mass.back(), mass.front() / 5.0) << mass.front() << " -> " << mass.back();
}

}  // namespace
