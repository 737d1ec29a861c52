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

#include "tcgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tcgp/error.hpp"

namespace tcgp {

double twcrps_from_samples(std::span<const double> draws, double z, double t) {
  if (draws.size() < 2) throw InputError("twcrps: needs at least two draws");
  const double vz = std::min(z, t);
  std::vector<double> v(draws.size());
  double spread = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    v[i] = std::min(draws[i], t);
    spread += std::fabs(v[i] - vz);
  }
  std::sort(v.begin(), v.end());
  // sum over pairs l < r of v_(r) - v_(l), written through consecutive gaps
  const double k = static_cast<double>(v.size());
  double pairs = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double below = static_cast<double>(i);
    pairs += (v[i] - v[i - 1]) * below * (k - below);
  }
  return spread / k - pairs / (k * k);
}

double twcrps(const GnParams& forecast, double z, double t, int draws, Rng& rng) {
  if (draws < 2) throw InputError("twcrps: needs at least two draws");
  const auto y = gn_sample(forecast, static_cast<std::size_t>(draws), rng);
  return twcrps_from_samples(y, z, t);
}

double testset_twcrps(const GpModel& gp, const GnParams& g, double t, const Eigen::MatrixXd& probes,
                      const Eigen::VectorXd& responses, int draws, Rng& rng) {
  if (probes.rows() == 0 || probes.rows() != responses.size()) throw InputError("testset_twcrps: probe mismatch");
  const auto pm = gp.predict(probes);
  double total = 0.0;
  for (std::size_t i = 0; i < pm.size(); ++i) {
    const GnParams forecast{g.beta, pm[i].mean, g.scale * pm[i].sd};
    total += twcrps(forecast, responses[static_cast<Eigen::Index>(i)], t, draws, rng);
  }
  return total / static_cast<double>(pm.size());
}

double gaussian_crps(double mean, double sd, double z) {
  if (!(sd >= 0.0)) throw InputError("gaussian_crps: sd must be nonnegative");
  if (sd == 0.0) return std::fabs(z - mean);
  const double w = (z - mean) / sd;
  const double cdf = 0.5 * std::erfc(-w / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * w * w) / std::sqrt(2.0 * std::numbers::pi);
  return sd * (w * (2.0 * cdf - 1.0) + 2.0 * pdf - 1.0 / std::sqrt(std::numbers::pi));
}

double ParticleCloud::p_estimate() const { return std::exp(log_p_estimate); }

namespace {

// Metropolis sweeps targeting the uniform law on {f <= level}; the proposal
// is symmetric after reflection, so a move is accepted iff it stays below.
void mutate(const Objective& f, const Box& bounds, ParticleCloud& cloud, double level, int sweeps, Rng& rng) {
  const Eigen::Index d = cloud.particles.cols();
  for (int s = 0; s < sweeps; ++s) {
    int accepted = 0;
    for (Eigen::Index i = 0; i < cloud.particles.rows(); ++i) {
      Point y(d);
      for (Eigen::Index j = 0; j < d; ++j) {
        y[j] = cloud.particles(i, j) + cloud.proposal_scale * bounds.width(static_cast<std::size_t>(j)) * rng.normal();
      }
      y = bounds.reflect(y);
      const double fy = f(y);
      if (std::isfinite(fy) && fy <= level) {
        cloud.particles.row(i) = y.transpose();
        cloud.values[i] = fy;
        ++accepted;
      }
    }
    const double rate = static_cast<double>(accepted) / static_cast<double>(cloud.particles.rows());
    if (rate < 0.2) cloud.proposal_scale *= 0.6;
    if (rate > 0.4) cloud.proposal_scale *= 1.5;
    cloud.proposal_scale = std::clamp(cloud.proposal_scale, 1e-8, 1.0);
  }
}

// Keeps the particles with value <= level and refills the cloud by drawing
// uniformly among them.
void select_below(ParticleCloud& cloud, double level, Rng& rng) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < cloud.values.size(); ++i) {
    if (cloud.values[i] <= level) keep.push_back(i);
  }
  const Eigen::Index m = cloud.particles.rows();
  Eigen::MatrixXd particles(m, cloud.particles.cols());
  Eigen::VectorXd values(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index src = keep[rng.index(keep.size())];
    particles.row(i) = cloud.particles.row(src);
    values[i] = cloud.values[src];
  }
  cloud.particles = std::move(particles);
  cloud.values = std::move(values);
}

Eigen::Index count_below(const Eigen::VectorXd& v, double level) {
  return (v.array() <= level).count();
}

}  // namespace

ParticleCloud subset_simulate(const Objective& f, const Box& bounds, double t, int m, Rng& rng,
                              const std::optional<ParticleCloud>& warm, const SubsetOptions& options) {
  if (m < 2) throw InputError("subset_simulate: needs at least two particles");
  if (!(options.level_fraction > 0.0 && options.level_fraction < 1.0)) {
    throw InputError("subset_simulate: level_fraction must lie in (0, 1)");
  }
  if (std::isnan(t)) throw InputError("subset_simulate: threshold is NaN");

  ParticleCloud cloud;
  if (warm && warm->size() == static_cast<std::size_t>(m) && warm->level >= t &&
      static_cast<std::size_t>(warm->particles.cols()) == bounds.dim()) {
    cloud = *warm;
    cloud.stages = 0;
  } else {
    cloud.particles.resize(m, static_cast<Eigen::Index>(bounds.dim()));
    cloud.values.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const Point x = bounds.sample(rng);
      const double v = f(x);
      if (!std::isfinite(v)) throw NumericalError("subset_simulate: non-finite objective value");
      cloud.particles.row(i) = x.transpose();
      cloud.values[i] = v;
    }
    cloud.level = std::numeric_limits<double>::infinity();
    cloud.log_p_estimate = 0.0;
  }

  const double md = static_cast<double>(m);
  const auto needed = static_cast<Eigen::Index>(std::ceil(options.level_fraction * md));
  while (true) {
    const Eigen::Index below_t = count_below(cloud.values, t);
    if (below_t >= needed) {
      if (below_t < m) {
        cloud.log_p_estimate += std::log(static_cast<double>(below_t) / md);
        select_below(cloud, t, rng);
        mutate(f, bounds, cloud, t, options.mh_sweeps, rng);
      }
      cloud.level = t;
      return cloud;
    }
    if (cloud.stages >= options.stage_cap) {
      std::ostringstream os;
      os << "subset_simulate: level " << t << " not reached after " << cloud.stages << " stages; deepest level "
         << cloud.level;
      throw NumericalError(os.str());
    }
    std::vector<double> sorted(cloud.values.data(), cloud.values.data() + m);
    std::nth_element(sorted.begin(), sorted.begin() + (needed - 1), sorted.end());
    const double level = sorted[static_cast<std::size_t>(needed - 1)];
    const Eigen::Index below = count_below(cloud.values, level);
    cloud.log_p_estimate += std::log(static_cast<double>(below) / md);
    select_below(cloud, level, rng);
    mutate(f, bounds, cloud, level, options.mh_sweeps, rng);
    cloud.level = level;
    ++cloud.stages;
  }
}

double ks_uniform(std::vector<double> u) {
  if (u.empty()) throw InputError("ks_uniform: empty sample");
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double lo = static_cast<double>(j) / n;
    const double hi = static_cast<double>(j + 1) / n;
    d = std::max({d, hi - u[j], u[j] - lo});
  }
  return d;
}

double testset_tkspit(const GpModel& gp, const GnParams& g, double t, const ParticleCloud& cloud,
                      std::size_t max_points) {
  const std::size_t count = std::min(cloud.size(), max_points);
  if (count == 0) throw InputError("testset_tkspit: empty cloud");
  const GnParams residual{g.beta, 0.0, g.scale};
  std::vector<double> u(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double z = cloud.values[row];
    if (z > t) throw InputError("testset_tkspit: particle above the threshold");
    const PredictiveMoments pm = gp.predict(Point(cloud.particles.row(row).transpose()));
    const double log_ft = predictive_log_cdf(t, pm, residual);
    if (!std::isfinite(log_ft)) {
      throw NumericalError("testset_tkspit: zero predicted mass below t at particle " + std::to_string(i));
    }
    u[i] = std::min(1.0, std::exp(predictive_log_cdf(z, pm, residual) - log_ft));
  }
  return ks_uniform(std::move(u));
}

double occurrence_gap(std::span<const double> masses, const std::vector<bool>& indicators) {
  if (masses.empty() || masses.size() != indicators.size()) throw InputError("occurrence_gap: length mismatch");
  double mass = 0.0;
  double hits = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    mass += masses[i];
    if (indicators[i]) hits += 1.0;
  }
  return std::fabs(hits - mass) / static_cast<double>(masses.size());
}

double testset_occurrence(const GpModel& gp, const GnParams& g, double t, const Eigen::MatrixXd& probes,
                          const Eigen::VectorXd& responses) {
  if (probes.rows() == 0 || probes.rows() != responses.size()) throw InputError("testset_occurrence: probe mismatch");
  const GnParams residual{g.beta, 0.0, g.scale};
  const auto pm = gp.predict(probes);
  std::vector<double> masses(pm.size());
  std::vector<bool> hits(pm.size());
  for (std::size_t i = 0; i < pm.size(); ++i) {
    masses[i] = predictive_cdf(t, pm[i], residual);
    hits[i] = responses[static_cast<Eigen::Index>(i)] <= t;
  }
  return occurrence_gap(masses, hits);
}

double testset_occurrence(const GpModel& gp, const GnParams& g, double t, const Eigen::MatrixXd& probes,
                          const Objective& f) {
  Eigen::VectorXd responses(probes.rows());
  for (Eigen::Index i = 0; i < probes.rows(); ++i) responses[i] = f(Point(probes.row(i).transpose()));
  return testset_occurrence(gp, g, t, probes, responses);
}

}  // namespace tcgp
