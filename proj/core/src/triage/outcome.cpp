// SPDX-License-Identifier: Apache-2.0
#include "cxrt/triage/outcome.hpp"

#include "cxrt/error.hpp"

namespace cxrt::triage {

std::string_view to_string(Decision d) noexcept { return d == Decision::accept ? "accept" : "abstain"; }

TriageOutcome TriageOutcome::accepted(Label label, std::string rationale, policy::DecidedBy by, double confidence) {
  return TriageOutcome{Decision::accept, label, std::nullopt, std::move(rationale), by, confidence};
}

TriageOutcome TriageOutcome::abstained(Label suggested, std::string rationale, policy::DecidedBy by,
                                       double confidence) {
  return TriageOutcome{Decision::abstain, suggested, suggested, std::move(rationale), by, confidence};
}

nlohmann::ordered_json TriageOutcome::to_json() const {
  nlohmann::ordered_json j;
  j["decision"] = to_string(decision);
  j["final_label"] = to_string(final_label);
  j["suggested_label"] = suggested_label ? nlohmann::ordered_json(to_string(*suggested_label)) : nlohmann::ordered_json(nullptr);
  j["rationale"] = rationale;
  j["decided_by"] = policy::to_string(decided_by);
  j["final_confidence"] = final_confidence;
  return j;
}

TriageOutcome TriageOutcome::from_json(const nlohmann::json& j) {
  try {
    TriageOutcome o;
    o.decision = j.at("decision").get<std::string>() == "accept" ? Decision::accept : Decision::abstain;
    const auto label = parse_label(j.at("final_label").get<std::string>());
    if (!label) throw DataError("bad final_label");
    o.final_label = *label;
    if (!j.at("suggested_label").is_null()) o.suggested_label = parse_label(j["suggested_label"].get<std::string>());
    o.rationale = j.at("rationale").get<std::string>();
    const auto by = policy::parse_decided_by(j.at("decided_by").get<std::string>());
    if (!by) throw DataError("bad decided_by");
    o.decided_by = *by;
    o.final_confidence = j.at("final_confidence").get<double>();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed decision record: ") + e.what());
  }
}

}  // namespace cxrt::triage
