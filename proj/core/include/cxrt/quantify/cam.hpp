// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "cxrt/grid.hpp"
#include "cxrt/tools/scorer.hpp"

namespace cxrt::quantify {

struct CamArtifact {
  Image native;   // min-max normalized, at the model's own resolution
  Image heatmap;  // upsampled to the case image, then normalized
  RgbImage overlay;
};

/// Min-max normalization to [0,1]; a constant map becomes all zeros.
Image normalize_heatmap(const Image& raw);

/// Jet-style colormap of a value in [0,1] as RGB in [0,1].
std::array<double, 3> jet(double v) noexcept;

/// 0.6 * gray + 0.4 * jet(heatmap), per channel.
RgbImage overlay_heatmap(const Image& gray, const Image& heatmap);

/// Upsample (bilinear), normalize and overlay. Throws DataError when the raw
/// map is empty or has non-finite values.
CamArtifact make_cam_artifact(const Image& gray, const Image& raw_heatmap);

struct CamOutcome {
  std::optional<CamArtifact> artifact;
  std::vector<std::string> notes;
};

/// Absent with note "cam_unavailable" when the scorer has no cam capability
/// or returns nothing; absent with "cam_malformed" for a bad heatmap.
CamOutcome build_cam_artifact(const tools::CaseRecord& record, tools::ScorerAdapter& scorer);

}  // namespace cxrt::quantify
