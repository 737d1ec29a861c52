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

#include "tcgp/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "tcgp/error.hpp"
#include "tcgp/optimize.hpp"

namespace tcgp {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-6;
constexpr double kLengthscaleLo = 1e-3;
constexpr double kLengthscaleHi = 1e3;

Eigen::MatrixXd scaled_points(const Eigen::MatrixXd& x, const Eigen::VectorXd& lengthscales) {
  return x * lengthscales.cwiseInverse().asDiagonal();
}

// Correlation matrix of row-wise points already divided by the lengthscales.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& scaled, int p) {
  const Eigen::Index n = scaled.rows();
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double h = (scaled.row(i) - scaled.row(j)).norm();
      r(i, j) = r(j, i) = matern_correlation(h, p);
    }
  }
  return r;
}

struct Factorization {
  Eigen::MatrixXd lower;
  double jitter = 0.0;  // relative to the diagonal level
};

std::optional<Factorization> factorize_with_jitter(const Eigen::MatrixXd& k, double diag_level) {
  for (double rel = kJitterStart; rel <= kJitterMax * (1.0 + 1e-12); rel *= 10.0) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += rel * diag_level;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    if (!lower.allFinite() || (lower.diagonal().array() <= 0.0).any()) continue;
    return Factorization{std::move(lower), rel};
  }
  return std::nullopt;
}

double sample_variance(const Eigen::VectorXd& z) {
  if (z.size() < 2) return 0.0;
  const double m = z.mean();
  return (z.array() - m).square().sum() / static_cast<double>(z.size() - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Box bounds) : bounds_(std::move(bounds)), points_(0, static_cast<Eigen::Index>(bounds_.dim())) {}

Dataset::Dataset(Box bounds, Eigen::MatrixXd points, Eigen::VectorXd responses) : Dataset(std::move(bounds)) {
  if (points.rows() != responses.size()) throw InputError("Dataset: points and responses differ in length");
  if (points.rows() > 0 && static_cast<std::size_t>(points.cols()) != dim()) {
    throw InputError("Dataset: point dimension does not match bounds");
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) add(points.row(i).transpose(), responses[i]);
}

void Dataset::check_point(const Point& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) throw InputError("Dataset: point dimension does not match bounds");
  if (!bounds_.contains(x)) throw InputError("Dataset: point outside bounds");
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if ((points_.row(i).transpose() - x).cwiseAbs().maxCoeff() == 0.0) {
      throw InputError("Dataset: duplicate point (noiseless interpolation needs distinct inputs)");
    }
  }
}

void Dataset::add(const Point& x, double z) {
  check_point(x);
  if (!std::isfinite(z)) throw InputError("Dataset: response must be finite");
  const Eigen::Index n = points_.rows();
  points_.conservativeResize(n + 1, static_cast<Eigen::Index>(dim()));
  points_.row(n) = x.transpose();
  responses_.conservativeResize(n + 1);
  responses_[n] = z;
}

Dataset Dataset::without(std::size_t i) const {
  if (i >= size()) throw InputError("Dataset::without: index out of range");
  Dataset out(bounds_);
  for (std::size_t j = 0; j < size(); ++j) {
    if (j != i) out.add(point(j), response(j));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kernel

void KernelParams::validate(std::size_t dim) const {
  if (!(variance > 0.0) || !std::isfinite(variance)) throw InputError("KernelParams: variance must be positive");
  if (static_cast<std::size_t>(lengthscales.size()) != dim) throw InputError("KernelParams: lengthscale count mismatch");
  if (!(lengthscales.array() > 0.0).all() || !lengthscales.allFinite()) {
    throw InputError("KernelParams: lengthscales must be positive");
  }
  if (regularity < 1) throw InputError("KernelParams: regularity must be >= 1");
}

double matern_correlation(double h, int p) {
  if (p < 1) throw InputError("matern_correlation: regularity must be >= 1");
  const double nu = p + 0.5;
  const double r = std::sqrt(2.0 * nu) * h;
  switch (p) {
    case 1:
      return (1.0 + r) * std::exp(-r);
    case 2:
      return (1.0 + r + r * r / 3.0) * std::exp(-r);
    default:
      break;
  }
  // p!/(2p)! * sum_i (p+i)! / (i! (p-i)!) (2r)^(p-i)
  double sum = 0.0;
  for (int i = 0; i <= p; ++i) {
    const double log_coef = std::lgamma(p + i + 1.0) - std::lgamma(i + 1.0) - std::lgamma(p - i + 1.0);
    sum += std::exp(log_coef) * std::pow(2.0 * r, p - i);
  }
  const double lead = std::exp(std::lgamma(p + 1.0) - std::lgamma(2.0 * p + 1.0));
  return lead * sum * std::exp(-r);
}

double matern_cov(const Point& x, const Point& y, const KernelParams& k) {
  if (x.size() != y.size()) throw InputError("matern_cov: dimension mismatch");
  k.validate(static_cast<std::size_t>(x.size()));
  const double h = ((x - y).array() / k.lengthscales.array()).matrix().norm();
  return k.variance * matern_correlation(h, k.regularity);
}

// ---------------------------------------------------------------------------
// GpModel

GpModel::GpModel(const Dataset& data, double mean, KernelParams kernel)
    : x_(data.points()), z_(data.responses()), mean_(mean), kernel_(std::move(kernel)) {
  kernel_.validate(data.dim());
  if (data.size() == 0) throw InputError("GpModel: empty dataset");
  const Eigen::MatrixXd k = kernel_.variance * correlation_matrix(scaled_points(x_, kernel_.lengthscales), kernel_.regularity);
  auto fact = factorize_with_jitter(k, kernel_.variance);
  if (!fact) throw NumericalError("GpModel: Gram matrix is singular even at the largest jitter level");
  chol_ = std::move(fact->lower);
  jitter_ = fact->jitter * kernel_.variance;

  const auto lower = chol_.triangularView<Eigen::Lower>();
  const Eigen::VectorXd centered = z_.array() - mean_;
  const Eigen::VectorXd w = lower.solve(centered);
  alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(w);

  const Eigen::Index n = z_.size();
  const Eigen::MatrixXd linv = lower.solve(Eigen::MatrixXd::Identity(n, n));
  inv_diag_ = linv.colwise().squaredNorm().transpose();

  const double log_det = 2.0 * chol_.diagonal().array().log().sum();
  log_likelihood_ = -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + log_det + w.squaredNorm());
}

Eigen::VectorXd GpModel::cross_cov(const Point& x) const {
  if (x.size() != x_.cols()) throw InputError("GpModel::predict: dimension mismatch");
  const Eigen::Index n = x_.rows();
  Eigen::VectorXd k(n);
  const Eigen::ArrayXd inv_rho = kernel_.lengthscales.array().inverse();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double h = ((x_.row(i).transpose().array() - x.array()) * inv_rho).matrix().norm();
    k[i] = kernel_.variance * matern_correlation(h, kernel_.regularity);
  }
  return k;
}

std::optional<Eigen::Index> GpModel::design_index(const Point& x) const {
  for (Eigen::Index i = 0; i < x_.rows(); ++i) {
    if ((x_.row(i).transpose() - x).cwiseAbs().maxCoeff() == 0.0) return i;
  }
  return std::nullopt;
}

PredictiveMoments GpModel::predict(const Point& x) const {
  if (x.size() != x_.cols()) throw InputError("GpModel::predict: dimension mismatch");
  // noiseless interpolation is exact at design points
  if (const auto i = design_index(x)) return PredictiveMoments{z_[*i], 0.0};
  const Eigen::VectorXd k = cross_cov(x);
  const double m = mean_ + k.dot(alpha_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  const double var = std::max(kernel_.variance - v.squaredNorm(), 0.0);
  return PredictiveMoments{m, std::sqrt(var)};
}

std::vector<PredictiveMoments> GpModel::predict(const Eigen::MatrixXd& points) const {
  if (points.cols() != x_.cols()) throw InputError("GpModel::predict: dimension mismatch");
  const Eigen::Index n = x_.rows();
  const Eigen::Index m = points.rows();
  const Eigen::MatrixXd a = scaled_points(x_, kernel_.lengthscales);
  const Eigen::MatrixXd b = scaled_points(points, kernel_.lengthscales);
  Eigen::MatrixXd k(n, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, j) = kernel_.variance * matern_correlation((a.row(i) - b.row(j)).norm(), kernel_.regularity);
    }
  }
  const Eigen::VectorXd means = (k.transpose() * alpha_).array() + mean_;
  chol_.triangularView<Eigen::Lower>().solveInPlace(k);
  const Eigen::VectorXd reduction = k.colwise().squaredNorm().transpose();
  std::vector<PredictiveMoments> out(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    out[static_cast<std::size_t>(j)] = {means[j], std::sqrt(std::max(kernel_.variance - reduction[j], 0.0))};
    if (const auto i = design_index(points.row(j).transpose())) out[static_cast<std::size_t>(j)] = {z_[*i], 0.0};
  }
  return out;
}

PredictiveMoments GpModel::loo_predict(std::size_t i) const {
  if (z_.size() < 2) throw InputError("loo_predict: needs at least two records");
  if (i >= size()) throw InputError("loo_predict: index out of range");
  const auto idx = static_cast<Eigen::Index>(i);
  const double d = inv_diag_[idx];
  return PredictiveMoments{z_[idx] - alpha_[idx] / d, std::sqrt(std::max(1.0 / d - jitter_, 0.0))};
}

std::vector<PredictiveMoments> GpModel::loo_all() const {
  std::vector<PredictiveMoments> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = loo_predict(i);
  return out;
}

Eigen::MatrixXd GpModel::gram() const {
  Eigen::MatrixXd k = kernel_.variance * correlation_matrix(scaled_points(x_, kernel_.lengthscales), kernel_.regularity);
  k.diagonal().array() += jitter_;
  return k;
}

// ---------------------------------------------------------------------------
// Maximum likelihood

ProfiledLikelihood profile_likelihood(const Dataset& data, const Eigen::VectorXd& lengthscales, int regularity,
                                      double variance_lo, double variance_hi) {
  const Eigen::Index n = static_cast<Eigen::Index>(data.size());
  const Eigen::MatrixXd r = correlation_matrix(scaled_points(data.points(), lengthscales), regularity);
  auto fact = factorize_with_jitter(r, 1.0);
  if (!fact) return {};
  const auto lower = fact->lower.triangularView<Eigen::Lower>();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Eigen::VectorXd l1 = lower.solve(ones);
  const Eigen::VectorXd lz = lower.solve(data.responses());
  const double mean = l1.dot(lz) / l1.squaredNorm();
  const double quad = (lz - mean * l1).squaredNorm();
  const double variance = std::clamp(quad / static_cast<double>(n), variance_lo, variance_hi);
  const double log_det_r = 2.0 * fact->lower.diagonal().array().log().sum();
  const double ll = -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi * variance) + log_det_r +
                            quad / variance);
  if (!std::isfinite(ll)) return {};
  return ProfiledLikelihood{true, ll, mean, variance};
}

MleFit fit_mle_detailed(const Dataset& data, int regularity, const MleOptions& options) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  if (n < 2) throw InputError("fit_mle: needs at least two records");
  if (regularity < 1) throw InputError("fit_mle: regularity must be >= 1");

  const double s2 = sample_variance(data.responses());
  const double scale2 = s2 > 0.0 ? s2 : 1.0;
  const double var_lo = 1e-12 * scale2;
  const double var_hi = 1e12 * scale2;

  std::vector<double> lo(d), hi(d);
  Point base(static_cast<Eigen::Index>(d));
  const double spread = std::pow(static_cast<double>(n), -1.0 / (2.0 * static_cast<double>(d)));
  for (std::size_t i = 0; i < d; ++i) {
    const double w = data.bounds().width(i);
    lo[i] = std::log(kLengthscaleLo * w);
    hi[i] = std::log(kLengthscaleHi * w);
    base[static_cast<Eigen::Index>(i)] = std::log(w * spread);
  }
  const Box log_box(lo, hi);

  auto negative_ll = [&](const Point& log_rho) {
    const auto prof = profile_likelihood(data, log_rho.array().exp().matrix(), regularity, var_lo, var_hi);
    return prof.ok ? -prof.log_likelihood : std::numeric_limits<double>::infinity();
  };

  NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations > 0 ? options.max_evaluations : 80 * static_cast<int>(d + 1);
  nm.value_tolerance = 1e-7;
  nm.initial_step = 0.08;

  Rng rng(options.seed);
  std::vector<double> start_lls;
  std::optional<Point> best_x;
  double best_value = std::numeric_limits<double>::infinity();
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    Point start = base;
    if (r > 0) {
      for (Eigen::Index i = 0; i < start.size(); ++i) start[i] += rng.normal();
    }
    start = log_box.clamp(start);
    const double start_value = negative_ll(start);
    start_lls.push_back(-start_value);
    const OptimResult res = nelder_mead(negative_ll, start, log_box, nm);
    if (res.value < best_value) {
      best_value = res.value;
      best_x = res.x;
    }
  }
  if (!best_x) throw NumericalError("fit_mle: Gram matrix singular at every trial lengthscale");

  const Eigen::VectorXd rho = best_x->array().exp();
  const auto prof = profile_likelihood(data, rho, regularity, var_lo, var_hi);
  KernelParams kernel{prof.variance, rho, regularity};
  return MleFit{GpModel(data, prof.mean, kernel), std::move(start_lls), prof};
}

GpModel fit_mle(const Dataset& data, int regularity, const MleOptions& options) {
  return fit_mle_detailed(data, regularity, options).model;
}

}  // namespace tcgp
