// SPDX-License-Identifier: Apache-2.0
#include <nlohmann/json.hpp>

#include "cxrt/assets.hpp"
#include "cxrt/error.hpp"
#include "cxrt/policy/router.hpp"

namespace cxrt::policy {

namespace {

constexpr std::string_view kStateOpen = "STATE:\n";
constexpr std::string_view kStateClose = "\n\nDecide next_tool.";

}  // namespace

std::string render_router_prompt(const RouterState& state) {
  const std::string_view prompt = assets::router_prompt();
  const auto open = prompt.find(kStateOpen);
  const auto close = open == std::string_view::npos ? open : prompt.find(kStateClose, open);
  if (close == std::string_view::npos) throw Error(ErrorKind::internal, "router prompt has no STATE block");
  std::string out(prompt.substr(0, open + kStateOpen.size()));
  out += state.to_json().dump(2);
  out += prompt.substr(close);
  return out;
}

nlohmann::json extract_router_state(std::string_view prompt) {
  const auto open = prompt.find(kStateOpen);
  const auto close = open == std::string_view::npos ? open : prompt.find(kStateClose, open);
  if (close == std::string_view::npos) throw DataError("prompt has no STATE block");
  const auto body = prompt.substr(open + kStateOpen.size(), close - open - kStateOpen.size());
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("STATE block is not valid JSON: ") + e.what());
  }
}

RouterReply parse_router_reply(std::string_view text) {
  const auto first = text.find('{');
  const auto last = text.rfind('}');
  if (first == std::string_view::npos || last == std::string_view::npos || last < first) {
    throw RouterReplyError("reply contains no JSON object");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.substr(first, last - first + 1));
  } catch (const nlohmann::json::exception& e) {
    throw RouterReplyError(std::string("reply is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw RouterReplyError("reply is not an object");
  const auto tool = j.find("next_tool");
  if (tool == j.end() || !tool->is_string()) throw RouterReplyError("next_tool missing or not a string");

  RouterReply r;
  r.next_tool_text = tool->get<std::string>();
  r.next_tool = parse_action(r.next_tool_text);
  if (const auto it = j.find("reason"); it != j.end() && it->is_string()) r.reason = it->get<std::string>();
  if (const auto it = j.find("stop"); it != j.end()) {
    if (!it->is_boolean()) throw RouterReplyError("stop is not a boolean");
    r.stop = it->get<bool>();
  }
  if (const auto it = j.find("final_label"); it != j.end() && it->is_string()) {
    r.final_label = parse_pe_label(it->get<std::string>());
  }
  if (const auto it = j.find("decided_by"); it != j.end() && it->is_string()) r.decided_by = it->get<std::string>();
  return r;
}

RouterDecision LlmRouter::propose(const RouterState& state, CaseSession& session, int step) {
  if (fell_back_) return fallback_.propose(state, session, step);

  const tools::ChatRequest request{"", render_router_prompt(state), nullptr, {}};
  std::optional<RouterReply> reply;
  for (int attempt = 0; attempt < 2 && !reply; ++attempt) {
    try {
      reply = parse_router_reply(client_.complete(request));
    } catch (const AdapterError& e) {
      session.add_violation(step, "malformed_router_reply", e.what());
    }
  }
  if (!reply) {
    fell_back_ = true;
    session.add_violation(step, "router_fallback", "rule router completes the case");
    return fallback_.propose(state, session, step);
  }

  RouterDecision d;
  d.step = step;
  d.decided_by = DecidedBy::llm_router;
  d.reason = reply->reason;
  d.stop = reply->stop;
  d.final_label = reply->final_label;
  if (reply->next_tool) {
    d.next_tool = *reply->next_tool;
  } else {
    d.next_tool = clamp_target(session);
    session.add_violation(step, "invalid_action",
                          "'" + reply->next_tool_text + "' replaced by " + std::string(to_string(d.next_tool)));
  }
  if (d.stop && (d.next_tool == Action::tta || d.next_tool == Action::moe)) {
    session.add_violation(step, "stop_ignored", "stop requested together with " + std::string(to_string(d.next_tool)));
  }
  return d;
}

const triage::TriageOutcome& run_llm_router(CaseSession& session, Toolbox& toolbox, tools::ChatClient& client,
                                            const RouterPolicy& policy, int max_steps) {
  LlmRouter router(client);
  return route_case(session, router, toolbox, policy, max_steps);
}

}  // namespace cxrt::policy
