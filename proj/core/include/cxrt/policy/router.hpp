// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "cxrt/error.hpp"
#include "cxrt/policy/case_session.hpp"
#include "cxrt/policy/router_state.hpp"
#include "cxrt/policy/toolbox.hpp"
#include "cxrt/tools/chat_client.hpp"

namespace cxrt::policy {

inline constexpr int kDefaultMaxSteps = 6;

/// Proposes the next action. Proposals are validated and clamped by
/// route_case before anything runs.
class Router {
 public:
  virtual ~Router() = default;
  virtual RouterDecision propose(const RouterState& state, CaseSession& session, int step) = 0;
};

/// Fixed escalation: direct accept when the guardrail allows, else TTA, then
/// MoE, then the terminal VLM.
class RuleRouter : public Router {
 public:
  explicit RuleRouter(DecidedBy step_agent = DecidedBy::rule_router) : agent_(step_agent) {}
  RouterDecision propose(const RouterState& state, CaseSession& session, int step) override;

 private:
  DecidedBy agent_;
};

/// Asks a chat model for each step using the router prompt. A malformed
/// reply is retried once; a second failure hands the rest of the case to the
/// rule router with decided_by=fallback.
class LlmRouter : public Router {
 public:
  explicit LlmRouter(tools::ChatClient& client) : client_(client) {}
  RouterDecision propose(const RouterState& state, CaseSession& session, int step) override;
  bool fell_back() const noexcept { return fell_back_; }

 private:
  tools::ChatClient& client_;
  bool fell_back_ = false;
  RuleRouter fallback_{DecidedBy::fallback};
};

/// Replacement for a disallowed proposal: POST_ACCEPT once accepted, else
/// the first of tta, moe, vlm not yet run.
Action clamp_target(const CaseSession& session) noexcept;

/// Prompt with the serialized state substituted into its STATE block.
std::string render_router_prompt(const RouterState& state);

/// Inverse of render_router_prompt's substitution; used by stub clients.
nlohmann::json extract_router_state(std::string_view prompt);

/// Thrown by parse_router_reply for replies that are not a decision object.
class RouterReplyError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

/// Parses the first {...} object in `text`. next_tool must be a string;
/// unknown action names come back as nullopt next_tool for clamping.
struct RouterReply {
  std::optional<Action> next_tool;
  std::string next_tool_text;
  std::string reason;
  bool stop = false;
  std::optional<Label> final_label;
  std::string decided_by;
};
RouterReply parse_router_reply(std::string_view text);

/// Drives `router` until the case reaches a terminal outcome or max_steps
/// decisions have been made (the last slot is forced terminal).
const triage::TriageOutcome& route_case(CaseSession& session, Router& router, Toolbox& toolbox,
                                        const RouterPolicy& policy, int max_steps = kDefaultMaxSteps);

const triage::TriageOutcome& run_rule_router(CaseSession& session, Toolbox& toolbox, const RouterPolicy& policy);

const triage::TriageOutcome& run_llm_router(CaseSession& session, Toolbox& toolbox, tools::ChatClient& client,
                                            const RouterPolicy& policy, int max_steps = kDefaultMaxSteps);

}  // namespace cxrt::policy
