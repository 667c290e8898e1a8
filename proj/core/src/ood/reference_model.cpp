// SPDX-License-Identifier: Apache-2.0
#include "cxrt/ood/reference_model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cxrt/error.hpp"

namespace cxrt::ood {

bool ReferenceModel::factorize(double lambda) {
  const Eigen::Index d = covariance_.rows();
  Eigen::MatrixXd regularized = covariance_;
  regularized.diagonal().array() += lambda;
  factor_.compute(regularized);
  if (factor_.info() != Eigen::Success) return false;
  const Eigen::VectorXd diag = Eigen::MatrixXd(factor_.matrixL()).diagonal();
  if (!diag.allFinite() || (diag.array() <= 0).any()) return false;
  // Reject factors whose pivots span more than 12 orders of magnitude in
  // squared scale; the solve is numerically meaningless beyond that.
  const double hi = diag.maxCoeff();
  const double lo = diag.minCoeff();
  if (d > 0 && lo * lo < 1e-12 * hi * hi) return false;
  lambda_ = lambda;
  return true;
}

ReferenceModel ReferenceModel::fit(std::span<const Eigen::VectorXd> zs, double lambda_rel) {
  if (zs.size() < 2) throw DataError("reference model needs at least two vectors");
  const Eigen::Index d = zs.front().size();
  if (d == 0) throw DataError("reference model dimension is zero");
  if (lambda_rel < 0) throw DataError("lambda_rel must be non-negative");

  const double n = static_cast<double>(zs.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& z : zs) {
    if (z.size() != d) throw DataError("reference vectors have inconsistent dimensions");
    if (!z.allFinite()) throw DataError("reference vector contains non-finite values");
    mean += z;
  }
  mean /= n;
  Eigen::MatrixXd centered(static_cast<Eigen::Index>(zs.size()), d);
  for (std::size_t i = 0; i < zs.size(); ++i) centered.row(static_cast<Eigen::Index>(i)) = (zs[i] - mean).transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / (n - 1.0);
  cov = 0.5 * (cov + cov.transpose());

  ReferenceModel model;
  model.mean_ = std::move(mean);
  model.covariance_ = std::move(cov);
  model.n_ref_ = zs.size();

  double scale = model.covariance_.trace() / static_cast<double>(d);
  if (!(scale > 0)) scale = 1.0;

  std::vector<double> ladder;
  if (lambda_rel == 0.0) ladder.push_back(0.0);
  for (double rel = lambda_rel == 0.0 ? kDefaultLambdaRel : lambda_rel; rel <= kMaxLambdaRel * (1 + 1e-12); rel *= 10) {
    ladder.push_back(rel);
  }
  for (double rel : ladder) {
    if (model.factorize(rel * scale)) {
      model.lambda_rel_ = rel;
      return model;
    }
  }
  throw DataError("covariance irreparably singular");
}

ReferenceModel ReferenceModel::from_parts(Eigen::VectorXd mean, Eigen::MatrixXd covariance, double lambda,
                                          std::size_t n_ref, std::optional<double> tau_ood, double lambda_rel) {
  if (mean.size() == 0) throw DataError("reference model dimension is zero");
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size()) {
    throw DataError("covariance shape does not match mean");
  }
  if (!mean.allFinite() || !covariance.allFinite()) throw DataError("reference model has non-finite entries");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw DataError("covariance is not symmetric");
  }
  if (lambda < 0) throw DataError("lambda must be non-negative");
  ReferenceModel model;
  model.mean_ = std::move(mean);
  model.covariance_ = std::move(covariance);
  model.n_ref_ = n_ref;
  model.lambda_rel_ = lambda_rel;
  if (!model.factorize(lambda)) throw DataError("regularized covariance is not positive definite");
  if (tau_ood) model.set_tau_ood(*tau_ood);
  return model;
}

void ReferenceModel::set_tau_ood(double tau) {
  if (!(tau >= 0) || !std::isfinite(tau)) throw DataError("tau_ood must be finite and non-negative");
  tau_ood_ = tau;
}

double ReferenceModel::mahalanobis(const Eigen::VectorXd& z) const {
  if (z.size() != mean_.size()) throw DataError("mahalanobis: dimension mismatch");
  if (!z.allFinite()) throw DataError("mahalanobis: non-finite input");
  const Eigen::VectorXd y = factor_.matrixL().solve(z - mean_);
  return y.norm();
}

double calibrate_tau(std::span<const double> scores, double q) {
  if (scores.empty()) throw DataError("calibrate_tau: no scores");
  if (!(q > 0 && q <= 100)) throw DataError("calibrate_tau: percentile must lie in (0, 100]");
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // Guard against q*n/100 landing a hair above an integer through rounding.
  auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

OodSignal score_case(const Eigen::VectorXd& z, const ReferenceModel& model) {
  const auto tau = model.tau_ood();
  if (!tau) throw DataError("reference model has no calibrated tau_ood");
  OodSignal s;
  s.score = model.mahalanobis(z);
  s.is_ood = s.score > *tau;
  return s;
}

}  // namespace cxrt::ood
