// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "cxrt/label.hpp"
#include "cxrt/policy/actions.hpp"
#include "cxrt/policy/guardrail.hpp"
#include "cxrt/tools/confidence.hpp"
#include "cxrt/tools/moe.hpp"
#include "cxrt/tools/tta.hpp"
#include "cxrt/tools/vlm.hpp"
#include "cxrt/triage/outcome.hpp"

namespace cxrt::policy {

using ordered_json = nlohmann::ordered_json;

/// Stage II signals for one case.
struct CaseSignals {
  tools::ConfidenceSignal base;
  double frd_maha = 0.0;
  double thr_maha = 0.0;
  double ridge_lambda = 0.0;
};

struct RouterDecision {
  int step = 0;
  Action next_tool = Action::abstain;
  std::string reason;
  bool stop = false;
  std::optional<Label> final_label;
  DecidedBy decided_by = DecidedBy::rule_router;
};

struct ToolEvent {
  int seq = 0;
  std::string tool;  // tta, moe, vlm, post_accept
  bool ok = false;
  std::string started_at;
  double duration_ms = 0.0;
  ordered_json inputs = ordered_json::object();
  ordered_json outputs = ordered_json::object();
  std::optional<std::string> error;
};

struct Violation {
  int step = 0;
  std::string kind;
  std::string detail;
};

/// Everything that happened while routing one case. The routers read and
/// extend it; the trace writer serializes it.
class CaseSession {
 public:
  CaseSession(CaseSignals signals, Thresholds thresholds);

  const CaseSignals& signals() const noexcept { return signals_; }
  const Thresholds& thresholds() const noexcept { return thresholds_; }
  const GuardrailResult& guardrail() const noexcept { return guardrail_; }

  bool ran(Action tool) const noexcept;
  bool tta_passed() const noexcept { return tta_passed_; }
  bool moe_passed() const noexcept { return moe_passed_; }
  /// Guardrail permission, or a passing TTA / MoE check.
  bool accept_allowed() const noexcept;

  /// Posterior after the latest successful refinement (TTA mean, else base p).
  double current_p() const noexcept;
  const std::optional<tools::TtaResult>& tta() const noexcept { return tta_; }
  const std::optional<tools::MoeResult>& moe() const noexcept { return moe_; }
  const std::optional<tools::VlmResult>& vlm() const noexcept { return vlm_; }

  bool accepted() const noexcept { return accepted_; }
  std::optional<Label> accepted_label() const noexcept;
  bool post_accept_requested() const noexcept { return post_accept_requested_; }
  bool finished() const noexcept { return outcome_.has_value(); }
  const std::optional<triage::TriageOutcome>& outcome() const noexcept { return outcome_; }

  const std::vector<ToolEvent>& tool_events() const noexcept { return events_; }
  const std::vector<RouterDecision>& decisions() const noexcept { return decisions_; }
  const std::vector<Violation>& violations() const noexcept { return violations_; }
  const std::vector<std::string>& notes() const noexcept { return notes_; }

  // Mutators used by the routers and the engine.
  void record_tta(tools::TtaResult r);
  void record_moe(tools::MoeResult r);
  void record_vlm(tools::VlmResult r);
  void mark_ran(Action tool);
  ToolEvent& add_event(ToolEvent e);
  void add_decision(RouterDecision d) { decisions_.push_back(std::move(d)); }
  void add_violation(int step, std::string kind, std::string detail);
  void add_note(std::string note) { notes_.push_back(std::move(note)); }
  void accept(Label label, std::string rationale, DecidedBy by, double confidence);
  void abstain(Label suggested, std::string rationale, DecidedBy by, double confidence);
  void request_post_accept() noexcept { post_accept_requested_ = true; }

 private:
  CaseSignals signals_;
  Thresholds thresholds_;
  GuardrailResult guardrail_;
  bool ran_tta_ = false;
  bool ran_moe_ = false;
  bool ran_vlm_ = false;
  bool tta_passed_ = false;
  bool moe_passed_ = false;
  std::optional<tools::TtaResult> tta_;
  std::optional<tools::MoeResult> moe_;
  std::optional<tools::VlmResult> vlm_;
  bool accepted_ = false;
  bool post_accept_requested_ = false;
  std::optional<triage::TriageOutcome> outcome_;
  std::vector<ToolEvent> events_;
  std::vector<RouterDecision> decisions_;
  std::vector<Violation> violations_;
  std::vector<std::string> notes_;
};

}  // namespace cxrt::policy
