// SPDX-License-Identifier: Apache-2.0
#include "cxrt/tools/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cxrt/error.hpp"

namespace cxrt::tools {

ConfidenceSignal derive_confidence(double p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw DataError("posterior out of [0,1]: " + std::to_string(p));
  return {p, std::max(p, 1.0 - p), p >= 0.5 ? Label::positive : Label::negative};
}

}  // namespace cxrt::tools
