// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cxrt/analytics/classification.hpp"
#include "cxrt/analytics/selective.hpp"
#include "cxrt/label.hpp"

namespace cxrt::app {

/// case_id -> ground truth, from a CSV with `case_id` and `label` columns.
std::map<std::string, Label> read_labels(const std::filesystem::path& csv);

struct OutcomeCounts {
  int accepted_pos = 0;
  int accepted_neg = 0;
  int abstained = 0;
  int quarantined = 0;
  int errors = 0;

  int total() const noexcept { return accepted_pos + accepted_neg + abstained + quarantined + errors; }
  nlohmann::ordered_json to_json() const;
};

struct EvalReport {
  int traces = 0;
  OutcomeCounts counts;
  std::vector<std::string> missing_labels;  // decided traces with no ground truth (excluded)
  std::vector<std::string> undecided;       // quarantined or failed cases (excluded)
  std::vector<analytics::LabeledPrediction> predictions;
  analytics::ClassificationMetrics classification;
  analytics::SelectiveMetrics selective;
  analytics::AutomationMetrics automation;
  std::vector<analytics::RiskCoveragePoint> curve;

  nlohmann::ordered_json to_json() const;
  /// k,coverage,risk rows with a header line.
  std::string curve_csv() const;
};

/// Predictions at full coverage use the final label, which for abstentions is
/// the suggested label; ranking uses final_confidence.
EvalReport evaluate_traces(const std::filesystem::path& traces_dir, const std::map<std::string, Label>& labels,
                           std::span<const double> coverages = analytics::kDefaultCoverages,
                           std::span<const double> budgets = analytics::kDefaultBudgets);

}  // namespace cxrt::app
