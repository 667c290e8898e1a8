// SPDX-License-Identifier: Apache-2.0
#include "cxrt/features/standardizer.hpp"

#include "cxrt/error.hpp"

namespace cxrt::features {

Standardizer fit_standardizer(std::span<const Eigen::VectorXd> aligned) {
  if (aligned.size() < 2) throw DataError("standardizer needs at least two reference vectors");
  const Eigen::Index d = aligned.front().size();
  // Welford accumulation.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(d);
  double count = 0;
  for (const auto& x : aligned) {
    if (x.size() != d) throw DataError("standardizer input has inconsistent dimensions");
    count += 1;
    const Eigen::VectorXd delta = x - mean;
    mean += delta / count;
    m2 += delta.cwiseProduct(x - mean);
  }
  Standardizer s;
  s.mean = mean;
  s.stddev = (m2 / (count - 1)).cwiseSqrt();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(s.stddev[j] > 0)) throw DataError("zero-variance feature column " + std::to_string(j));
  }
  return s;
}

Eigen::VectorXd standardize(const Eigen::VectorXd& aligned, const Standardizer& s) {
  if (aligned.size() != s.mean.size()) throw DataError("standardize: dimension mismatch");
  return (aligned - s.mean).cwiseQuotient(s.stddev);
}

Eigen::VectorXd unstandardize(const Eigen::VectorXd& z, const Standardizer& s) {
  if (z.size() != s.mean.size()) throw DataError("unstandardize: dimension mismatch");
  return z.cwiseProduct(s.stddev) + s.mean;
}

}  // namespace cxrt::features
