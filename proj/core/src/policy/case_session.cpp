// SPDX-License-Identifier: Apache-2.0
#include "cxrt/policy/case_session.hpp"

#include "cxrt/error.hpp"

namespace cxrt::policy {

CaseSession::CaseSession(CaseSignals signals, Thresholds thresholds)
    : signals_(signals),
      thresholds_(thresholds),
      guardrail_(evaluate_guardrail(signals.base.c, signals.frd_maha,
                                    Thresholds{thresholds.tau_conf, thresholds.tau_tta, thresholds.tau_moe,
                                               signals.thr_maha})) {
  thresholds_.tau_ood = signals.thr_maha;
}

bool CaseSession::ran(Action tool) const noexcept {
  switch (tool) {
    case Action::tta: return ran_tta_;
    case Action::moe: return ran_moe_;
    case Action::vlm: return ran_vlm_;
    default: return false;
  }
}

bool CaseSession::accept_allowed() const noexcept {
  return guardrail_.allowed.allow_accept || tta_passed_ || moe_passed_;
}

double CaseSession::current_p() const noexcept { return tta_ ? tta_->mean : signals_.base.p; }

std::optional<Label> CaseSession::accepted_label() const noexcept {
  if (!accepted_ || !outcome_) return std::nullopt;
  return outcome_->final_label;
}

void CaseSession::mark_ran(Action tool) {
  switch (tool) {
    case Action::tta: ran_tta_ = true; break;
    case Action::moe: ran_moe_ = true; break;
    case Action::vlm: ran_vlm_ = true; break;
    default: break;
  }
}

void CaseSession::record_tta(tools::TtaResult r) {
  tta_passed_ = r.stddev <= thresholds_.tau_tta && r.mean_confidence >= thresholds_.tau_conf;
  tta_ = std::move(r);
}

void CaseSession::record_moe(tools::MoeResult r) {
  moe_passed_ = r.agreement >= thresholds_.tau_moe;
  moe_ = std::move(r);
}

void CaseSession::record_vlm(tools::VlmResult r) { vlm_ = std::move(r); }

ToolEvent& CaseSession::add_event(ToolEvent e) {
  e.seq = static_cast<int>(events_.size());
  events_.push_back(std::move(e));
  return events_.back();
}

void CaseSession::add_violation(int step, std::string kind, std::string detail) {
  violations_.push_back(Violation{step, std::move(kind), std::move(detail)});
}

void CaseSession::accept(Label label, std::string rationale, DecidedBy by, double confidence) {
  if (outcome_) throw Error(ErrorKind::internal, "case already has an outcome");
  if (!accept_allowed()) throw Error(ErrorKind::internal, "accept without permission");
  accepted_ = true;
  outcome_ = triage::TriageOutcome::accepted(label, std::move(rationale), by, confidence);
}

void CaseSession::abstain(Label suggested, std::string rationale, DecidedBy by, double confidence) {
  if (outcome_) throw Error(ErrorKind::internal, "case already has an outcome");
  outcome_ = triage::TriageOutcome::abstained(suggested, std::move(rationale), by, confidence);
}

}  // namespace cxrt::policy
