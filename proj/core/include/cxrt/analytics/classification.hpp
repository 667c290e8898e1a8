// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <span>

#include "cxrt/analytics/selective.hpp"

namespace cxrt::analytics {

/// Confusion-matrix metrics with positive = edema. Precision (recall) is
/// absent when there are no predicted (actual) positives.
struct ClassificationMetrics {
  int n = 0;
  int tp = 0;
  int fp = 0;
  int tn = 0;
  int fn = 0;
  double accuracy = 0.0;
  std::optional<double> precision;
  std::optional<double> recall;

  nlohmann::ordered_json to_json() const;
};

/// Uses each prediction's label. Throws DataError on empty input.
ClassificationMetrics classification_metrics(std::span<const LabeledPrediction> preds);

/// Thresholds posteriors: predicted positive iff score >= threshold.
ClassificationMetrics classification_metrics(std::span<const Label> truth, std::span<const double> scores,
                                             double threshold = 0.5);

}  // namespace cxrt::analytics
