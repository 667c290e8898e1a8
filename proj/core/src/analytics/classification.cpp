// SPDX-License-Identifier: Apache-2.0
#include "cxrt/analytics/classification.hpp"

#include "cxrt/error.hpp"

namespace cxrt::analytics {

namespace {

ClassificationMetrics finish(ClassificationMetrics m) {
  m.n = m.tp + m.fp + m.tn + m.fn;
  if (m.n == 0) throw DataError("classification metrics need at least one prediction");
  m.accuracy = static_cast<double>(m.tp + m.tn) / m.n;
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / (m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / (m.tp + m.fn);
  return m;
}

void count(ClassificationMetrics& m, Label truth, Label predicted) {
  if (predicted == Label::positive) {
    (truth == Label::positive ? m.tp : m.fp) += 1;
  } else {
    (truth == Label::negative ? m.tn : m.fn) += 1;
  }
}

}  // namespace

nlohmann::ordered_json ClassificationMetrics::to_json() const {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  return {{"n", n},
          {"accuracy", accuracy},
          {"precision", opt(precision)},
          {"recall", opt(recall)},
          {"confusion", {{"tp", tp}, {"fp", fp}, {"tn", tn}, {"fn", fn}}}};
}

ClassificationMetrics classification_metrics(std::span<const LabeledPrediction> preds) {
  ClassificationMetrics m;
  for (const auto& p : preds) count(m, p.true_label, p.predicted_label);
  return finish(m);
}

ClassificationMetrics classification_metrics(std::span<const Label> truth, std::span<const double> scores,
                                             double threshold) {
  if (truth.size() != scores.size()) throw DataError("labels and scores differ in length");
  ClassificationMetrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    count(m, truth[i], scores[i] >= threshold ? Label::positive : Label::negative);
  }
  return finish(m);
}

}  // namespace cxrt::analytics
