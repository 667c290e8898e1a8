// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "cxrt/grid.hpp"
#include "cxrt/quantify/masks.hpp"

namespace cxrt::quantify {

inline constexpr int kAnnulusRadius = 3;

/// Median of a sample (mean of the two middle values for even sizes).
/// Throws DataError on an empty sample.
double median_of(std::vector<double> values);

/// For each 8-connected component of `mask`, sets its pixels to the median of
/// the annulus (disk dilation of radius 3 minus the component) restricted to
/// pixels outside `mask`. An empty annulus uses the median of unmasked pixels
/// inside `lung` (when given and non-empty), else of all unmasked pixels.
/// Pixels outside `mask` are untouched. Throws DataError("degenerate mask")
/// when `mask` covers the whole image.
Image annulus_fill(const Image& image, const Mask& mask, const Mask* lung = nullptr);

Image suppress_ribs(const Image& image, const Mask& rib_mask, const Mask* lung = nullptr);

struct DeviceSuppression {
  Image image;
  int fill_events = 0;  // 1 when the annulus fallback was used on a non-empty mask
  std::string method;   // "inpaint", "annulus_fill" or "none"
  std::optional<std::string> warning;
};

/// With an adapter, the masked region comes from the adapter output clamped
/// to [0,1]. A missing or failing adapter, or output of the wrong shape,
/// falls back to annulus_fill.
DeviceSuppression suppress_devices(const Image& image, const Mask& device_mask, InpaintAdapter* adapter,
                                   const Mask* lung = nullptr);

}  // namespace cxrt::quantify
