// SPDX-License-Identifier: Apache-2.0
#include "cxrt/app/evaluate.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cxrt/error.hpp"
#include "cxrt/features/feature_table.hpp"
#include "cxrt/triage/trace.hpp"

namespace cxrt::app {

using nlohmann::json;
using nlohmann::ordered_json;

std::map<std::string, Label> read_labels(const std::filesystem::path& csv) {
  std::ifstream in(csv);
  if (!in) throw DataError("cannot open labels table " + csv.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError("labels table is empty: " + csv.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = features::split_csv_line(line);
  const auto col = [&](const char* name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw DataError(std::string("labels table has no '") + name + "' column");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t id_col = col("case_id");
  const std::size_t label_col = col("label");
  std::map<std::string, Label> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = features::split_csv_line(line);
    if (fields.size() <= std::max(id_col, label_col)) {
      throw DataError("labels table line " + std::to_string(line_no) + ": too few fields");
    }
    const auto label = parse_label(fields[label_col]);
    if (!label) throw DataError("labels table line " + std::to_string(line_no) + ": bad label '" + fields[label_col] + "'");
    labels[fields[id_col]] = *label;
  }
  return labels;
}

ordered_json OutcomeCounts::to_json() const {
  return {{"accepted_pos", accepted_pos},
          {"accepted_neg", accepted_neg},
          {"abstained", abstained},
          {"quarantined", quarantined},
          {"errors", errors}};
}

ordered_json EvalReport::to_json() const {
  return {{"traces", traces},
          {"evaluated", predictions.size()},
          {"counts", counts.to_json()},
          {"missing_labels", missing_labels},
          {"excluded_undecided", undecided},
          {"full_coverage", classification.to_json()},
          {"selective", selective.to_json()},
          {"automation", automation.to_json()}};
}

std::string EvalReport::curve_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "k,coverage,risk\n";
  for (const auto& p : curve) out << p.k << ',' << p.coverage << ',' << p.risk << '\n';
  return out.str();
}

EvalReport evaluate_traces(const std::filesystem::path& traces_dir, const std::map<std::string, Label>& labels,
                           std::span<const double> coverages, std::span<const double> budgets) {
  EvalReport r;
  for (const auto& trace : triage::read_traces(traces_dir)) {
    ++r.traces;
    const std::string case_id = trace.at("case_id").get<std::string>();
    const std::string status = trace.at("status").get<std::string>();
    if (status == "quarantined") ++r.counts.quarantined;
    if (status == "error") ++r.counts.errors;
    const auto& d = trace.at("decision");
    if (status != "decided" || d.is_null()) {
      r.undecided.push_back(case_id);
      continue;
    }
    const bool abstain = d.at("decision") == "abstain";
    const auto final_label = parse_label(d.at("final_label").get<std::string>());
    if (!final_label) throw DataError("trace " + case_id + " has a bad final_label");
    if (abstain) {
      ++r.counts.abstained;
    } else if (*final_label == Label::positive) {
      ++r.counts.accepted_pos;
    } else {
      ++r.counts.accepted_neg;
    }
    const auto truth = labels.find(case_id);
    if (truth == labels.end()) {
      r.missing_labels.push_back(case_id);
      continue;
    }
    r.predictions.push_back(
        {case_id, truth->second, *final_label, d.at("final_confidence").get<double>(), abstain});
  }
  r.classification = analytics::classification_metrics(r.predictions);
  if (!r.predictions.empty()) {
    r.selective = analytics::selective_metrics(r.predictions, coverages, budgets);
    r.curve = analytics::risk_coverage_curve(r.predictions);
  }
  r.automation = analytics::automation_metrics(r.predictions);
  return r;
}

}  // namespace cxrt::app
