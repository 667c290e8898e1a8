// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cxrt/label.hpp"

namespace cxrt::analytics {

/// One scored case. For abstentions `predicted_label` is the suggested label.
struct LabeledPrediction {
  std::string case_id;
  Label true_label = Label::negative;
  Label predicted_label = Label::negative;
  double confidence = 0.0;
  bool was_abstain = false;

  bool correct() const noexcept { return true_label == predicted_label; }
};

struct RiskCoveragePoint {
  int k = 0;
  double coverage = 0.0;
  double risk = 0.0;
};

/// Sorted by confidence descending, ties by case_id ascending; one point per
/// prefix size k = 1..N. Throws DataError on empty input or non-finite confidence.
std::vector<RiskCoveragePoint> risk_coverage_curve(std::span<const LabeledPrediction> preds);

/// Mean of the prefix risks.
double aurc(std::span<const RiskCoveragePoint> curve);

/// Risk at k = ceil(c * N). Throws DataError unless 0 < c <= 1.
double risk_at_coverage(std::span<const RiskCoveragePoint> curve, double c);

/// Largest k/N with risk(k) <= budget, or 0.
double coverage_at_risk(std::span<const RiskCoveragePoint> curve, double budget);

inline constexpr double kDefaultCoverages[] = {0.8, 1.0};
inline constexpr double kDefaultBudgets[] = {0.05};

struct SelectiveMetrics {
  int n = 0;
  double aurc = 0.0;
  std::vector<std::pair<double, double>> risk_at;      // coverage -> risk
  std::vector<std::pair<double, double>> coverage_at;  // risk budget -> coverage

  nlohmann::ordered_json to_json() const;
};

SelectiveMetrics selective_metrics(std::span<const LabeledPrediction> preds,
                                   std::span<const double> coverages = kDefaultCoverages,
                                   std::span<const double> budgets = kDefaultBudgets);

/// Coverage counting only automated (non-abstained) decisions.
struct AutomationMetrics {
  int n = 0;
  int automated = 0;
  double coverage = 0.0;
  std::optional<double> risk;  // errors among automated decisions; absent when none

  nlohmann::ordered_json to_json() const;
};

AutomationMetrics automation_metrics(std::span<const LabeledPrediction> preds);

}  // namespace cxrt::analytics
