// SPDX-License-Identifier: Apache-2.0
#include "cxrt/tools/vlm.hpp"

#include <charconv>
#include <regex>
#include <vector>

#include "cxrt/assets.hpp"

namespace cxrt::tools {

std::string_view to_string(VlmParseFailure f) noexcept {
  switch (f) {
    case VlmParseFailure::missing_markers: return "missing_markers";
    case VlmParseFailure::multiple_blocks: return "multiple_blocks";
    case VlmParseFailure::field_count: return "field_count";
    case VlmParseFailure::bad_label: return "bad_label";
    case VlmParseFailure::bad_confidence: return "bad_confidence";
    case VlmParseFailure::confidence_out_of_range: return "confidence_out_of_range";
    case VlmParseFailure::empty_explanation: return "empty_explanation";
    case VlmParseFailure::inconsistent: return "inconsistent";
  }
  return "unknown";
}

namespace {

constexpr std::string_view kOpen = "===LINE===";
constexpr std::string_view kClose = "===END===";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

VlmResult parse_vlm_response(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<std::size_t> opens;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]) == kOpen) opens.push_back(i);
  }
  if (opens.empty()) throw VlmParseError(VlmParseFailure::missing_markers, "no ===LINE=== marker");
  if (opens.size() > 1) throw VlmParseError(VlmParseFailure::multiple_blocks, "more than one ===LINE=== block");
  const std::size_t open = opens.front();
  if (open + 2 >= lines.size() || trim(lines[open + 2]) != kClose) {
    throw VlmParseError(VlmParseFailure::missing_markers, "payload is not followed by ===END===");
  }

  const std::string_view payload = lines[open + 1];
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto bar = payload.find('|', start);
    fields.push_back(payload.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  if (fields.size() != 3) {
    throw VlmParseError(VlmParseFailure::field_count, "expected 3 fields, got " + std::to_string(fields.size()));
  }

  const std::string_view label_text = trim(fields[0]);
  if (label_text != "0" && label_text != "1") {
    throw VlmParseError(VlmParseFailure::bad_label, "label must be 0 or 1, got '" + std::string(label_text) + "'");
  }

  const std::string conf_text(trim(fields[1]));
  static const std::regex kDecimal(R"(^(\d+(\.\d*)?|\.\d+)$)");
  if (!std::regex_match(conf_text, kDecimal)) {
    throw VlmParseError(VlmParseFailure::bad_confidence, "not a decimal: '" + conf_text + "'");
  }
  double conf = 0;
  const auto [ptr, ec] = std::from_chars(conf_text.data(), conf_text.data() + conf_text.size(), conf);
  if (ec != std::errc{} || ptr != conf_text.data() + conf_text.size()) {
    throw VlmParseError(VlmParseFailure::bad_confidence, "not a decimal: '" + conf_text + "'");
  }
  if (conf < 0.0 || conf > 1.0) {
    throw VlmParseError(VlmParseFailure::confidence_out_of_range, "confidence outside [0,1]: " + conf_text);
  }

  const std::string_view explanation = trim(fields[2]);
  if (explanation.empty()) throw VlmParseError(VlmParseFailure::empty_explanation, "explanation is empty");

  const Label label = label_text == "1" ? Label::positive : Label::negative;
  const Label implied = conf >= 0.5 ? Label::positive : Label::negative;
  if (label != implied) {
    throw VlmParseError(VlmParseFailure::inconsistent,
                        "label " + std::string(label_text) + " disagrees with confidence " + conf_text);
  }
  return VlmResult{label, conf, std::string(explanation), std::string(text)};
}

std::string format_vlm_block(Label label, std::string_view conf_text, std::string_view explanation) {
  std::string out;
  out += kOpen;
  out += '\n';
  out += label == Label::positive ? '1' : '0';
  out += '|';
  out += conf_text;
  out += '|';
  out += explanation;
  out += '\n';
  out += kClose;
  return out;
}

VlmResult run_vlm(const CaseRecord& record, ChatClient& client, int parse_retries) {
  const ChatRequest request{"", std::string(assets::vlm_prompt()), &record.pixels, record.case_id};
  for (int attempt = 0;; ++attempt) {
    const std::string reply = client.complete(request);
    try {
      return parse_vlm_response(reply);
    } catch (const VlmParseError&) {
      if (attempt >= parse_retries) throw;
    }
  }
}

}  // namespace cxrt::tools
