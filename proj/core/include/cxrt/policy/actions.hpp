// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

namespace cxrt::policy {

/// Router actions. `abstain` is accepted from the LLM router in addition to
/// the five protocol tools.
enum class Action { accept, tta, moe, vlm, abstain, post_accept };

/// Protocol spelling: "accept", "tta", "moe", "vlm", "abstain", "POST_ACCEPT".
std::string_view to_string(Action a) noexcept;
std::optional<Action> parse_action(std::string_view text) noexcept;

enum class DecidedBy { guardrail_direct, tta, moe, vlm, llm_router, rule_router, fallback };

std::string_view to_string(DecidedBy d) noexcept;
std::optional<DecidedBy> parse_decided_by(std::string_view text) noexcept;

}  // namespace cxrt::policy
