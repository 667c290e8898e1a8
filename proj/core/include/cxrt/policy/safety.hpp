// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace cxrt::policy {

/// Checks a serialized trace for safety violations:
///  - an accept decision while the guardrail forbade accept and no earlier
///    TTA/MoE event passed;
///  - a guardrail_direct accept the guardrail did not allow;
///  - an accept after a VLM event, or any tool run twice;
///  - more than max_steps decisions, or not exactly one stop, placed last.
/// Returns one message per problem; empty means the trace is clean.
std::vector<std::string> audit_trace_safety(const nlohmann::json& trace, int max_steps);

}  // namespace cxrt::policy
