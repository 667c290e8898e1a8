// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cxrt/grid.hpp"

namespace cxrt {

/// Bilinear sample at fractional pixel-centre coordinates, clamping to the border.
double sample_bilinear(const Image& image, double y, double x) noexcept;

/// Bilinear resize with half-pixel centres (the convention used by common
/// imaging toolkits). Same-size resize is an exact copy.
Image resize_bilinear(const Image& image, int rows, int cols);

}  // namespace cxrt
