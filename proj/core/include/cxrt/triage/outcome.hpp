// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

#include "cxrt/label.hpp"
#include "cxrt/policy/actions.hpp"

namespace cxrt::triage {

enum class Decision { accept, abstain };

std::string_view to_string(Decision d) noexcept;

/// Terminal result for one case. For abstentions `final_label` equals the
/// suggested label.
struct TriageOutcome {
  Decision decision = Decision::abstain;
  Label final_label = Label::negative;
  std::optional<Label> suggested_label;
  std::string rationale;
  policy::DecidedBy decided_by = policy::DecidedBy::fallback;
  double final_confidence = 0.5;

  bool accepted_positive() const noexcept { return decision == Decision::accept && final_label == Label::positive; }

  static TriageOutcome accepted(Label label, std::string rationale, policy::DecidedBy by, double confidence);
  static TriageOutcome abstained(Label suggested, std::string rationale, policy::DecidedBy by, double confidence);

  nlohmann::ordered_json to_json() const;
  static TriageOutcome from_json(const nlohmann::json& j);
};

}  // namespace cxrt::triage
