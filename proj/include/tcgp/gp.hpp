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

#ifndef TCGP_GP_HPP
#define TCGP_GP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "tcgp/box.hpp"
#include "tcgp/predictive.hpp"

namespace tcgp {

/// Ordered evaluation records (X_i, Z_i) inside a bounded domain.
/// Points are stored row-wise and must be pairwise distinct.
class Dataset {
 public:
  explicit Dataset(Box bounds);
  Dataset(Box bounds, Eigen::MatrixXd points, Eigen::VectorXd responses);

  void add(const Point& x, double z);

  std::size_t size() const { return static_cast<std::size_t>(responses_.size()); }
  std::size_t dim() const { return bounds_.dim(); }
  const Box& bounds() const { return bounds_; }
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& responses() const { return responses_; }
  Point point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }
  double response(std::size_t i) const { return responses_[static_cast<Eigen::Index>(i)]; }

  /// Copy with record i removed.
  Dataset without(std::size_t i) const;

 private:
  void check_point(const Point& x) const;

  Box bounds_;
  Eigen::MatrixXd points_;
  Eigen::VectorXd responses_;
};

/// Anisotropic Matern kernel sigma^2 * kappa_nu(h), nu = regularity + 1/2.
struct KernelParams {
  double variance = 1.0;
  Eigen::VectorXd lengthscales;
  int regularity = 2;

  void validate(std::size_t dim) const;
};

/// Matern correlation kappa_nu(h) for half-integer nu = p + 1/2.
double matern_correlation(double h, int p);

double matern_cov(const Point& x, const Point& y, const KernelParams& k);

/// Noiseless constant-mean GP conditioned on a dataset with fixed
/// hyperparameters (simple kriging with the plugged-in mean). Immutable once
/// built; safe to query concurrently.
class GpModel {
 public:
  /// Factorizes the Gram matrix, escalating diagonal jitter from 1e-10 to
  /// 1e-6 times the variance. Throws NumericalError if all levels fail.
  GpModel(const Dataset& data, double mean, KernelParams kernel);

  /// Returns (Z_i, 0) exactly at a design point.
  PredictiveMoments predict(const Point& x) const;
  /// Batch prediction, one point per row.
  std::vector<PredictiveMoments> predict(const Eigen::MatrixXd& points) const;

  /// Moments at X_i from the model conditioned on every record but i, same
  /// hyperparameters. Uses the inverse-Gram identities.
  PredictiveMoments loo_predict(std::size_t i) const;
  std::vector<PredictiveMoments> loo_all() const;

  double mean() const { return mean_; }
  const KernelParams& kernel() const { return kernel_; }
  double jitter() const { return jitter_; }
  double log_likelihood() const { return log_likelihood_; }
  std::size_t size() const { return static_cast<std::size_t>(z_.size()); }
  const Eigen::MatrixXd& points() const { return x_; }
  const Eigen::VectorXd& responses() const { return z_; }
  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }
  /// Gram matrix including the jitter actually used.
  Eigen::MatrixXd gram() const;

 private:
  Eigen::VectorXd cross_cov(const Point& x) const;
  std::optional<Eigen::Index> design_index(const Point& x) const;

  Eigen::MatrixXd x_;
  Eigen::VectorXd z_;
  double mean_;
  KernelParams kernel_;
  double jitter_ = 0.0;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;     // K^{-1} (z - mean)
  Eigen::VectorXd inv_diag_;  // diag(K^{-1})
  double log_likelihood_ = 0.0;
};

/// Gaussian log-likelihood with mean and variance profiled out for given
/// lengthscales. The variance is clamped to [variance_lo, variance_hi].
struct ProfiledLikelihood {
  bool ok = false;
  double log_likelihood = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

ProfiledLikelihood profile_likelihood(const Dataset& data, const Eigen::VectorXd& lengthscales, int regularity,
                                      double variance_lo, double variance_hi);

struct MleOptions {
  int restarts = 5;
  /// Simplex budget per restart; 0 selects 80 * (d + 1).
  int max_evaluations = 0;
  std::uint64_t seed = 0;
};

struct MleFit {
  GpModel model;
  std::vector<double> start_log_likelihoods;
  ProfiledLikelihood best;
};

/// Maximum-likelihood fit of (mean, variance, lengthscales) with the
/// regularity held fixed. Multi-start simplex search over log-lengthscales
/// bounded to [1e-3, 1e3] x domain width; the first restart reaching the
/// largest likelihood wins.
MleFit fit_mle_detailed(const Dataset& data, int regularity, const MleOptions& options = {});
GpModel fit_mle(const Dataset& data, int regularity, const MleOptions& options = {});

}  // namespace tcgp

#endif  // TCGP_GP_HPP
