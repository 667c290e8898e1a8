// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace cxrt::assets {

std::string_view router_prompt();
std::string_view vlm_prompt();
std::string_view trace_schema();

/// Short content hash used as the version tag of a text asset.
std::string version_of(std::string_view text);

}  // namespace cxrt::assets

namespace cxrt {
std::string_view engine_version();
}
