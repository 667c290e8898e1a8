// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cxrt/quantify/cam.hpp"
#include "cxrt/quantify/lwi.hpp"
#include "cxrt/quantify/masks.hpp"
#include "cxrt/quantify/suppression.hpp"

namespace cxrt::quantify {

struct QuantifyAdapters {
  SegmentationAdapters segmentation;
  InpainterPtr inpainter;
};

struct QuantifyResult {
  std::optional<LwiReport> lwi;
  std::optional<Image> suppressed;
  std::optional<CamArtifact> cam;
  std::vector<std::string> notes;
};

/// Masks, rib then device suppression, LWI, and the CAM artifact. Never
/// throws for adapter trouble: missing pieces are left absent and noted.
QuantifyResult quantify_case(const CaseRecord& record, const QuantifyAdapters& adapters, tools::ScorerAdapter* cam_scorer);

}  // namespace cxrt::quantify
