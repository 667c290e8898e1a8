// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cxrt/features/extract.hpp"

namespace cxrt::features {

/// Retained feature columns (in first-seen order) and the value used to fill
/// each one when a case lacks it.
struct FeatureCatalog {
  std::vector<std::string> retained;
  std::vector<double> impute_values;
  // Diagnostics from fitting; not used for alignment.
  std::vector<std::string> removed_all_zero;
  std::vector<std::string> removed_zero_variance;
  std::vector<std::string> removed_all_missing;

  std::size_t dimension() const noexcept { return retained.size(); }
};

/// Median-imputes missing entries, then drops columns that are identically
/// zero or have zero variance. Throws DataError("degenerate feature space")
/// if nothing survives.
FeatureCatalog fit_catalog(std::span<const RawFeatureVector> reference);

/// Re-orders to catalog order, imputing absent or missing retained features
/// and dropping unknown ones.
Eigen::VectorXd align(const RawFeatureVector& raw, const FeatureCatalog& catalog);

/// Inverse view of an aligned vector, for round trips.
RawFeatureVector to_raw(const Eigen::VectorXd& aligned, const FeatureCatalog& catalog);

}  // namespace cxrt::features
