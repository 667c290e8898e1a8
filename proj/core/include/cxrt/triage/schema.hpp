// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace cxrt::triage {

/// Validates against the subset of JSON Schema the trace schema uses: type
/// (single or list), properties, required, additionalProperties (boolean),
/// enum, items, minimum, maximum. Returns one message per violation, each
/// prefixed by a JSON pointer.
std::vector<std::string> validate_against_schema(const nlohmann::json& instance, const nlohmann::json& schema);

/// The shipped trace schema.
const nlohmann::json& trace_schema();

std::vector<std::string> validate_trace(const nlohmann::json& trace);

}  // namespace cxrt::triage
