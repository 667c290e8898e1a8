// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cstdio>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"
#include "cxrt/policy/router.hpp"

namespace cxrt::policy {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string guardrail_reason(const CaseSession& s) {
  const CaseSignals& sig = s.signals();
  if (sig.frd_maha > sig.thr_maha) {
    return "out of distribution: frd_maha=" + num(sig.frd_maha) + " > thr_maha=" + num(sig.thr_maha);
  }
  return "low confidence: c=" + num(sig.base.c) + " < tau_conf=" + num(s.thresholds().tau_conf);
}

std::string tta_reason(const CaseSession& s) {
  if (!s.tta()) return "tta failed";
  return "tta not decisive: sigma=" + num(s.tta()->stddev) + ", mu_conf=" + num(s.tta()->mean_confidence);
}

std::string moe_reason(const CaseSession& s) {
  if (!s.moe()) return "moe failed";
  return "moe agreement " + num(s.moe()->agreement) + " < tau_moe=" + num(s.thresholds().tau_moe);
}

struct Evidence {
  Label label;
  DecidedBy by;
  double confidence;
  std::string rationale;
};

Evidence accept_evidence(const CaseSession& s) {
  if (s.tta_passed()) {
    const auto& t = *s.tta();
    return {t.label(), DecidedBy::tta, t.mean_confidence,
            "tta stable: sigma=" + num(t.stddev) + " <= " + num(s.thresholds().tau_tta) +
                ", mu_conf=" + num(t.mean_confidence)};
  }
  if (s.moe_passed()) {
    const auto& m = *s.moe();
    return {m.majority, DecidedBy::moe, m.agreement, "moe agreement " + num(m.agreement)};
  }
  const auto& base = s.signals().base;
  return {base.label, DecidedBy::guardrail_direct, base.c,
          "guardrail allows direct accept: c=" + num(base.c) + ", frd_maha=" + num(s.signals().frd_maha)};
}

bool terminal(const RouterDecision& d) {
  return d.next_tool != Action::tta && d.next_tool != Action::moe;
}

ordered_json tta_outputs(const tools::TtaResult& r, bool passed) {
  return {{"samples", r.samples},
          {"mean", r.mean},
          {"stddev", r.stddev},
          {"mean_confidence", r.mean_confidence},
          {"label", to_string(r.label())},
          {"passed", passed}};
}

ordered_json moe_outputs(const tools::MoeResult& r, bool passed) {
  ordered_json votes = ordered_json::array();
  for (Label v : r.votes) votes.push_back(to_string(v));
  return {{"votes", std::move(votes)},
          {"posteriors", r.posteriors},
          {"majority", to_string(r.majority)},
          {"agreement", r.agreement},
          {"passed", passed}};
}

ordered_json vlm_outputs(const tools::VlmResult& r) {
  return {{"label", r.label == Label::positive ? 1 : 0}, {"conf", r.conf}, {"explanation", r.explanation}, {"raw", r.raw}};
}

/// Runs `body`, recording one tool event. Returns false on tool failure.
template <typename Body>
bool run_tool(CaseSession& session, std::string tool, ordered_json inputs, Body&& body,
              std::string* failure_kind = nullptr) {
  ToolEvent e;
  e.tool = std::move(tool);
  e.started_at = iso_timestamp_now();
  e.inputs = std::move(inputs);
  const auto t0 = std::chrono::steady_clock::now();
  try {
    e.outputs = body();
    e.ok = true;
  } catch (const tools::VlmParseError& err) {
    e.error = err.what();
    e.outputs = {{"failure", tools::to_string(err.failure())}};
    if (failure_kind) *failure_kind = "vlm_parse_failure";
  } catch (const Error& err) {
    e.error = err.what();
  }
  e.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = e.ok;
  session.add_event(std::move(e));
  return ok;
}

RouterDecision clamp(RouterDecision d, const RouterState& state, CaseSession& session) {
  if (session.accepted()) {
    if (d.next_tool != Action::post_accept || !state.available(Action::post_accept)) {
      session.add_violation(d.step, "action_after_accept",
                            std::string(to_string(d.next_tool)) + " proposed after acceptance");
      d.next_tool = Action::post_accept;
    }
    return d;
  }
  bool ok = false;
  std::string kind;
  switch (d.next_tool) {
    case Action::abstain: ok = true; break;
    case Action::accept:
      ok = session.accept_allowed();
      kind = "forbidden_accept";
      break;
    case Action::post_accept: kind = "post_accept_before_accept"; break;
    default:
      ok = state.available(d.next_tool);
      kind = "tool_already_ran";
      break;
  }
  if (!ok) {
    const Action target = clamp_target(session);
    session.add_violation(d.step, kind,
                          std::string(to_string(d.next_tool)) + " replaced by " + std::string(to_string(target)));
    d.reason = "clamped from " + std::string(to_string(d.next_tool)) + ": " + d.reason;
    d.next_tool = target;
  }
  return d;
}

}  // namespace

Action clamp_target(const CaseSession& session) noexcept {
  if (session.accepted()) return Action::post_accept;
  for (Action a : {Action::tta, Action::moe, Action::vlm}) {
    if (!session.ran(a)) return a;
  }
  return Action::vlm;
}

RouterDecision RuleRouter::propose(const RouterState&, CaseSession& session, int step) {
  RouterDecision d;
  d.step = step;
  d.decided_by = agent_;
  if (session.accepted()) {
    d.next_tool = Action::post_accept;
    d.reason = "accepted";
    d.stop = true;
  } else if (session.accept_allowed()) {
    d.next_tool = Action::accept;
    d.reason = accept_evidence(session).rationale;
    d.stop = true;
  } else if (!session.ran(Action::tta)) {
    d.next_tool = Action::tta;
    d.reason = guardrail_reason(session);
  } else if (!session.ran(Action::moe)) {
    d.next_tool = Action::moe;
    d.reason = tta_reason(session);
  } else {
    d.next_tool = Action::vlm;
    d.reason = moe_reason(session);
    d.stop = true;
  }
  return d;
}

const triage::TriageOutcome& route_case(CaseSession& session, Router& router, Toolbox& toolbox,
                                        const RouterPolicy& policy, int max_steps) {
  if (max_steps < 1) throw UsageError("max_steps must be >= 1");
  if (session.finished()) throw Error(ErrorKind::internal, "case already routed");
  const auto& base = session.signals().base;

  bool done = false;
  for (int step = 0; step < max_steps && !done; ++step) {
    const RouterState state = build_router_state(session, policy);
    RouterDecision d = router.propose(state, session, step);
    d.step = step;
    d = clamp(std::move(d), state, session);

    const bool last = step == max_steps - 1;
    if (last && !terminal(d)) {
      session.add_note("step_budget_exhausted");
      d = RouterDecision{step, Action::abstain, "step_budget_exhausted", true, std::nullopt, DecidedBy::fallback};
    }

    switch (d.next_tool) {
      case Action::accept: {
        const Evidence ev = accept_evidence(session);
        if (d.final_label && *d.final_label != ev.label) {
          session.add_violation(step, "final_label_overridden",
                                std::string(to_pe_string(*d.final_label)) + " replaced by " +
                                    std::string(to_pe_string(ev.label)));
        }
        if (d.decided_by == DecidedBy::rule_router) d.decided_by = ev.by;
        session.accept(ev.label, ev.rationale, d.decided_by, ev.confidence);
        d.final_label = ev.label;
        d.stop = d.stop || ev.label == Label::negative || last;
        break;
      }
      case Action::tta:
        run_tool(session, "tta", toolbox.tta_inputs(), [&] {
          tools::TtaResult r = toolbox.tta();
          session.record_tta(r);
          return tta_outputs(r, session.tta_passed());
        });
        session.mark_ran(Action::tta);
        d.stop = false;
        d.final_label.reset();
        break;
      case Action::moe:
        run_tool(session, "moe", toolbox.moe_inputs(), [&] {
          tools::MoeResult r = toolbox.moe(base.label);
          session.record_moe(r);
          return moe_outputs(r, session.moe_passed());
        });
        session.mark_ran(Action::moe);
        d.stop = false;
        d.final_label.reset();
        break;
      case Action::vlm: {
        std::string failure;
        const bool ok = run_tool(
            session, "vlm", toolbox.vlm_inputs(),
            [&] {
              tools::VlmResult r = toolbox.vlm();
              session.record_vlm(r);
              return vlm_outputs(r);
            },
            &failure);
        session.mark_ran(Action::vlm);
        if (ok) {
          const auto& r = *session.vlm();
          session.abstain(r.label, r.explanation, DecidedBy::vlm, r.max_class_confidence());
        } else if (!failure.empty()) {
          session.abstain(base.label, failure, DecidedBy::fallback, base.c);
        } else {
          const bool chain = session.ran(Action::tta) && !session.tta() && session.ran(Action::moe) && !session.moe();
          session.abstain(base.label, chain ? "tool_chain_failure" : "vlm_unavailable", DecidedBy::fallback, base.c);
        }
        d.stop = true;
        d.final_label = session.outcome()->final_label;
        d.decided_by = session.outcome()->decided_by;
        break;
      }
      case Action::abstain:
        session.abstain(base.label, d.reason.empty() ? "abstain" : d.reason, d.decided_by, base.c);
        d.stop = true;
        d.final_label = base.label;
        break;
      case Action::post_accept:
        session.request_post_accept();
        d.stop = true;
        d.final_label = session.accepted_label();
        break;
    }
    done = d.stop;
    session.add_decision(std::move(d));
  }
  if (!session.finished()) throw Error(ErrorKind::internal, "router ended without an outcome");
  return *session.outcome();
}

const triage::TriageOutcome& run_rule_router(CaseSession& session, Toolbox& toolbox, const RouterPolicy& policy) {
  RuleRouter router;
  return route_case(session, router, toolbox, policy, kDefaultMaxSteps);
}

}  // namespace cxrt::policy
