// SPDX-License-Identifier: Apache-2.0
#include "cxrt/policy/actions.hpp"

#include <array>
#include <utility>

namespace cxrt::policy {

namespace {

constexpr std::array<std::pair<Action, std::string_view>, 6> kActions{{
    {Action::accept, "accept"},
    {Action::tta, "tta"},
    {Action::moe, "moe"},
    {Action::vlm, "vlm"},
    {Action::abstain, "abstain"},
    {Action::post_accept, "POST_ACCEPT"},
}};

constexpr std::array<std::pair<DecidedBy, std::string_view>, 7> kAgents{{
    {DecidedBy::guardrail_direct, "guardrail_direct"},
    {DecidedBy::tta, "tta"},
    {DecidedBy::moe, "moe"},
    {DecidedBy::vlm, "vlm"},
    {DecidedBy::llm_router, "llm_router"},
    {DecidedBy::rule_router, "rule_router"},
    {DecidedBy::fallback, "fallback"},
}};

}  // namespace

std::string_view to_string(Action a) noexcept {
  for (const auto& [k, v] : kActions) {
    if (k == a) return v;
  }
  return "abstain";
}

std::optional<Action> parse_action(std::string_view text) noexcept {
  for (const auto& [k, v] : kActions) {
    if (v == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(DecidedBy d) noexcept {
  for (const auto& [k, v] : kAgents) {
    if (k == d) return v;
  }
  return "fallback";
}

std::optional<DecidedBy> parse_decided_by(std::string_view text) noexcept {
  for (const auto& [k, v] : kAgents) {
    if (v == text) return k;
  }
  return std::nullopt;
}

}  // namespace cxrt::policy
