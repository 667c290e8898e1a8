// SPDX-License-Identifier: Apache-2.0
#include "cxrt/analytics/selective.hpp"

#include <algorithm>
#include <cmath>

#include "cxrt/error.hpp"

namespace cxrt::analytics {

std::vector<RiskCoveragePoint> risk_coverage_curve(std::span<const LabeledPrediction> preds) {
  if (preds.empty()) throw DataError("risk-coverage curve needs at least one prediction");
  std::vector<const LabeledPrediction*> order;
  order.reserve(preds.size());
  for (const auto& p : preds) {
    if (!std::isfinite(p.confidence)) throw DataError("non-finite confidence for case " + p.case_id);
    order.push_back(&p);
  }
  std::sort(order.begin(), order.end(), [](const LabeledPrediction* a, const LabeledPrediction* b) {
    if (a->confidence != b->confidence) return a->confidence > b->confidence;
    return a->case_id < b->case_id;
  });
  const int n = static_cast<int>(order.size());
  std::vector<RiskCoveragePoint> curve;
  curve.reserve(order.size());
  int errors = 0;
  for (int k = 1; k <= n; ++k) {
    if (!order[static_cast<std::size_t>(k - 1)]->correct()) ++errors;
    curve.push_back({k, static_cast<double>(k) / n, static_cast<double>(errors) / k});
  }
  return curve;
}

double aurc(std::span<const RiskCoveragePoint> curve) {
  if (curve.empty()) throw DataError("empty risk-coverage curve");
  double sum = 0.0;
  for (const auto& p : curve) sum += p.risk;
  return sum / static_cast<double>(curve.size());
}

double risk_at_coverage(std::span<const RiskCoveragePoint> curve, double c) {
  if (curve.empty()) throw DataError("empty risk-coverage curve");
  if (!(c > 0.0 && c <= 1.0)) throw DataError("coverage must be in (0,1]");
  const int n = static_cast<int>(curve.size());
  int k = static_cast<int>(std::ceil(c * n - 1e-9));
  k = std::clamp(k, 1, n);
  return curve[static_cast<std::size_t>(k - 1)].risk;
}

double coverage_at_risk(std::span<const RiskCoveragePoint> curve, double budget) {
  double best = 0.0;
  for (const auto& p : curve) {
    if (p.risk <= budget) best = std::max(best, p.coverage);
  }
  return best;
}

nlohmann::ordered_json SelectiveMetrics::to_json() const {
  nlohmann::ordered_json risk = nlohmann::ordered_json::array();
  for (const auto& [c, r] : risk_at) risk.push_back({{"coverage", c}, {"risk", r}});
  nlohmann::ordered_json cov = nlohmann::ordered_json::array();
  for (const auto& [b, c] : coverage_at) cov.push_back({{"risk_budget", b}, {"coverage", c}});
  return {{"n", n}, {"aurc", aurc}, {"risk_at_coverage", std::move(risk)}, {"coverage_at_risk", std::move(cov)}};
}

SelectiveMetrics selective_metrics(std::span<const LabeledPrediction> preds, std::span<const double> coverages,
                                   std::span<const double> budgets) {
  const auto curve = risk_coverage_curve(preds);
  SelectiveMetrics m;
  m.n = static_cast<int>(curve.size());
  m.aurc = aurc(curve);
  for (double c : coverages) m.risk_at.emplace_back(c, risk_at_coverage(curve, c));
  for (double b : budgets) m.coverage_at.emplace_back(b, coverage_at_risk(curve, b));
  return m;
}

nlohmann::ordered_json AutomationMetrics::to_json() const {
  return {{"n", n},
          {"automated", automated},
          {"coverage", coverage},
          {"risk", risk ? nlohmann::ordered_json(*risk) : nlohmann::ordered_json(nullptr)}};
}

AutomationMetrics automation_metrics(std::span<const LabeledPrediction> preds) {
  AutomationMetrics m;
  m.n = static_cast<int>(preds.size());
  int errors = 0;
  for (const auto& p : preds) {
    if (p.was_abstain) continue;
    ++m.automated;
    if (!p.correct()) ++errors;
  }
  if (m.n > 0) m.coverage = static_cast<double>(m.automated) / m.n;
  if (m.automated > 0) m.risk = static_cast<double>(errors) / m.automated;
  return m;
}

}  // namespace cxrt::analytics
