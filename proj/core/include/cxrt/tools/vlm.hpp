// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

#include "cxrt/error.hpp"
#include "cxrt/label.hpp"
#include "cxrt/tools/chat_client.hpp"
#include "cxrt/tools/scorer.hpp"

namespace cxrt::tools {

/// Parsed single-line verdict. `conf` is directional: 0 = definitely
/// negative, 1 = definitely positive; label == positive iff conf >= 0.5.
struct VlmResult {
  Label label = Label::negative;
  double conf = 0.0;
  std::string explanation;
  std::string raw;

  double max_class_confidence() const noexcept { return conf >= 0.5 ? conf : 1.0 - conf; }
};

enum class VlmParseFailure {
  missing_markers,
  multiple_blocks,
  field_count,
  bad_label,
  bad_confidence,
  confidence_out_of_range,
  empty_explanation,
  inconsistent,
};

std::string_view to_string(VlmParseFailure f) noexcept;

class VlmParseError : public AdapterError {
 public:
  VlmParseError(VlmParseFailure failure, const std::string& detail)
      : AdapterError("vlm parse failure (" + std::string(to_string(failure)) + "): " + detail), failure_(failure) {}
  VlmParseFailure failure() const noexcept { return failure_; }

 private:
  VlmParseFailure failure_;
};

/// Accepts text containing exactly one block
///
///     ===LINE===
///     L|C|E
///     ===END===
///
/// on consecutive lines (text outside the block is ignored). L is "0" or "1";
/// C is an unsigned decimal in [0,1]; E is non-empty and has no '|'; and L
/// must equal [C >= 0.5]. Whitespace around fields is trimmed. Throws
/// VlmParseError with the first failing rule.
VlmResult parse_vlm_response(std::string_view text);

/// Renders a block in the same format (used by stubs and tests).
std::string format_vlm_block(Label label, std::string_view conf_text, std::string_view explanation);

/// Sends the fixed VLM instruction with the case image; a parse failure is
/// retried `parse_retries` times before the VlmParseError propagates.
VlmResult run_vlm(const CaseRecord& record, ChatClient& client, int parse_retries = 1);

}  // namespace cxrt::tools
