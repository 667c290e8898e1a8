// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "cxrt/grid.hpp"

namespace cxrt::quantify {

struct LwiReport {
  double lwi = 0.0;
  std::int64_t lung_pixel_count = 0;
  int lambda_fill_events = 0;
  std::vector<std::string> suppression_chain;

  nlohmann::ordered_json to_json() const;
};

/// Mean of `suppressed` over the lung mask. Throws DataError("empty lung mask")
/// or on a shape mismatch.
LwiReport compute_lwi(const Image& suppressed, const Mask& lung_mask);

}  // namespace cxrt::quantify
