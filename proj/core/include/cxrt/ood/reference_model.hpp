// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace cxrt::ood {

inline constexpr double kDefaultLambdaRel = 1e-6;
inline constexpr double kMaxLambdaRel = 1e-1;
inline constexpr double kDefaultPercentile = 95.0;

/// Gaussian reference in standardized feature space: mean, sample covariance,
/// and a Cholesky factor of the ridge-regularized covariance Sigma + lambda*I.
class ReferenceModel {
 public:
  /// lambda = lambda_rel * trace(Sigma)/d (scale 1 when the trace is 0). If the
  /// factorization fails, lambda_rel is escalated x10 up to 1e-1; beyond that
  /// throws DataError("covariance irreparably singular").
  static ReferenceModel fit(std::span<const Eigen::VectorXd> zs, double lambda_rel = kDefaultLambdaRel);

  /// Rebuilds a model from stored parts with an explicit absolute lambda.
  static ReferenceModel from_parts(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double lambda,
                                   std::size_t n_ref, std::optional<double> tau_ood = std::nullopt,
                                   double lambda_rel = 0.0);

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  double ridge_lambda() const noexcept { return lambda_; }
  double ridge_lambda_rel() const noexcept { return lambda_rel_; }
  std::size_t reference_count() const noexcept { return n_ref_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(mean_.size()); }

  std::optional<double> tau_ood() const noexcept { return tau_ood_; }
  void set_tau_ood(double tau);

  /// sqrt(d^T (Sigma + lambda I)^{-1} d) with d = z - mean, via triangular
  /// solves against the factor. Throws DataError on non-finite input or
  /// dimension mismatch.
  double mahalanobis(const Eigen::VectorXd& z) const;

 private:
  ReferenceModel() = default;
  bool factorize(double lambda);

  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  double lambda_ = 0.0;
  double lambda_rel_ = 0.0;
  std::size_t n_ref_ = 0;
  std::optional<double> tau_ood_;
};

inline double mahalanobis(const Eigen::VectorXd& z, const ReferenceModel& model) { return model.mahalanobis(z); }

/// Nearest-rank percentile: the element at 1-based rank ceil(q/100 * n) of the
/// ascending scores. q in (0, 100]. Throws DataError on empty input.
double calibrate_tau(std::span<const double> scores, double q = kDefaultPercentile);

struct OodSignal {
  double score = 0.0;
  bool is_ood = false;  // score > tau, strictly
};

/// Requires a calibrated tau.
OodSignal score_case(const Eigen::VectorXd& z, const ReferenceModel& model);

}  // namespace cxrt::ood
