// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cxrt {

enum class Label { negative, positive };

inline Label opposite(Label l) noexcept { return l == Label::positive ? Label::negative : Label::positive; }

inline std::string_view to_string(Label l) noexcept { return l == Label::positive ? "positive" : "negative"; }

/// Router-protocol spelling of a label.
inline std::string_view to_pe_string(Label l) noexcept { return l == Label::positive ? "PE_yes" : "PE_no"; }

std::optional<Label> parse_label(std::string_view text);
std::optional<Label> parse_pe_label(std::string_view text);

}  // namespace cxrt
