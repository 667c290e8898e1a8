// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cxrt/grid.hpp"

namespace cxrt::features {

/// Named feature values for one case; a value may be missing.
struct RawFeatureVector {
  std::vector<std::string> names;
  std::vector<std::optional<double>> values;

  std::optional<double> get(std::string_view name) const;
};

/// Intensity bin width on the 0-255 scale used for histogram and texture features.
inline constexpr double kBinWidth = 10.0;
inline constexpr int kNumLevels = 26;

/// Bin index floor(255*v / 10), clamped to [0, 25]. Values within 1e-9 below a
/// bin edge are assigned to the upper bin so that exact multiples of 10/255
/// land where expected despite floating-point rounding.
int quantize_level(double v) noexcept;

/// Feature names produced by `extract_features`, in output order.
const std::vector<std::string>& builtin_feature_names();

/// Built-in radiomics subset over the whole image minus a one-pixel border.
///
/// First-order statistics use intensities in [0,1]: mean, population variance,
/// skewness, kurtosis (0 when variance is 0), energy (sum of squares), entropy
/// of the binned histogram in bits, min, max, median, 10th/90th percentiles
/// and interquartile range (linear-interpolated order statistics), and robust
/// mean absolute deviation over values inside [P10, P90].
///
/// Texture statistics come from symmetric gray-level co-occurrence matrices of
/// the binned image at distance 1 along (0,1), (1,0), (1,1), (1,-1); contrast,
/// correlation (0 for a degenerate matrix), joint energy and inverse
/// difference moment are averaged across offsets.
RawFeatureVector extract_features(const Image& image);

}  // namespace cxrt::features
