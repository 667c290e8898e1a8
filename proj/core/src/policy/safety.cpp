// SPDX-License-Identifier: Apache-2.0
#include "cxrt/policy/safety.hpp"

#include <set>

namespace cxrt::policy {

std::vector<std::string> audit_trace_safety(const nlohmann::json& trace, int max_steps) {
  std::vector<std::string> problems;
  if (trace.value("status", "") != "decided") return problems;
  try {
    const auto& sig = trace.at("signals");
    const auto& th = trace.at("thresholds");
    const double c = sig.at("c").get<double>();
    const double m = sig.at("frd_maha").get<double>();
    const double thr = sig.at("thr_maha").get<double>();
    const bool ood = m > thr;
    if (ood != sig.at("is_ood").get<bool>()) problems.push_back("is_ood disagrees with frd_maha > thr_maha");
    const bool guardrail_allows = !ood && c >= th.at("tau_conf").get<double>();

    const auto& decisions = trace.at("decisions");
    const auto& events = trace.at("tool_events");
    if (static_cast<int>(decisions.size()) > max_steps) problems.push_back("more than max_steps decisions");

    std::vector<const nlohmann::json*> tool_runs;
    std::set<std::string> seen;
    bool saw_vlm = false;
    for (const auto& e : events) {
      const std::string tool = e.at("tool").get<std::string>();
      if (tool == "post_accept") continue;
      if (!seen.insert(tool).second) problems.push_back("tool ran twice: " + tool);
      if (tool == "vlm") saw_vlm = true;
      tool_runs.push_back(&e);
    }

    std::size_t run_index = 0;
    bool verified = false;
    int stops = 0;
    for (std::size_t i = 0; i < decisions.size(); ++i) {
      const auto& d = decisions[i];
      const std::string action = d.at("next_tool").get<std::string>();
      if (d.at("stop").get<bool>()) {
        ++stops;
        if (i + 1 != decisions.size()) problems.push_back("stop decision is not the last one");
      }
      if (action == "tta" || action == "moe" || action == "vlm") {
        if (run_index >= tool_runs.size()) {
          problems.push_back("decision " + action + " has no tool event");
          continue;
        }
        const auto& e = *tool_runs[run_index++];
        if (e.at("tool").get<std::string>() != action) problems.push_back("tool event order differs from decisions");
        const auto& out = e.at("outputs");
        if (e.at("ok").get<bool>() && out.contains("passed") && out["passed"].get<bool>() && action != "vlm") {
          verified = true;
        }
      } else if (action == "accept") {
        if (!guardrail_allows && !verified) problems.push_back("accept without guardrail permission or verification");
        if (d.at("decided_by").get<std::string>() == "guardrail_direct" && !guardrail_allows) {
          problems.push_back("guardrail_direct accept the guardrail forbids");
        }
      }
    }
    if (stops != 1) problems.push_back("expected exactly one stop decision, found " + std::to_string(stops));
    if (run_index != tool_runs.size()) problems.push_back("tool events without a matching decision");

    const auto& decision = trace.at("decision");
    if (saw_vlm && decision.at("decision").get<std::string>() != "abstain") {
      problems.push_back("case with a VLM call was not abstained");
    }
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string("malformed trace: ") + e.what());
  }
  return problems;
}

}  // namespace cxrt::policy
