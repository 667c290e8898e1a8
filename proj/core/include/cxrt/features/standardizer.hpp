// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include <Eigen/Dense>

namespace cxrt::features {

struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;  // sample standard deviation, all entries > 0
};

/// Column means and sample standard deviations (n-1). Needs at least two rows;
/// throws DataError on a zero-variance column or inconsistent dimensions.
Standardizer fit_standardizer(std::span<const Eigen::VectorXd> aligned);

Eigen::VectorXd standardize(const Eigen::VectorXd& aligned, const Standardizer& s);
Eigen::VectorXd unstandardize(const Eigen::VectorXd& z, const Standardizer& s);

}  // namespace cxrt::features
