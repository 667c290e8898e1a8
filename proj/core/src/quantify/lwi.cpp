// SPDX-License-Identifier: Apache-2.0
#include "cxrt/quantify/lwi.hpp"

#include "cxrt/error.hpp"

namespace cxrt::quantify {

nlohmann::ordered_json LwiReport::to_json() const {
  return {{"lwi", lwi},
          {"lung_pixel_count", lung_pixel_count},
          {"lambda_fill_events", lambda_fill_events},
          {"suppression_chain", suppression_chain}};
}

LwiReport compute_lwi(const Image& suppressed, const Mask& lung_mask) {
  if (!suppressed.same_shape(lung_mask)) throw DataError("lung mask shape does not match the image");
  double sum = 0.0;
  std::int64_t n = 0;
  const auto px = suppressed.values();
  const auto m = lung_mask.values();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (m[i]) {
      sum += px[i];
      ++n;
    }
  }
  if (n == 0) throw DataError("empty lung mask");
  LwiReport r;
  r.lwi = sum / static_cast<double>(n);
  r.lung_pixel_count = n;
  return r;
}

}  // namespace cxrt::quantify
