// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "cxrt/quantify/pipeline.hpp"
#include "cxrt/triage/dispose.hpp"
#include "cxrt/triage/outcome.hpp"
#include "cxrt/triage/trace.hpp"

namespace cxrt::triage {

/// For accepted positives, writes the CAM heatmap (at the model's own
/// resolution), the overlay and the suppressed image as PNGs under
/// positive/artifacts/<case_id>/. Other outcomes, and
/// components that are absent, produce no files.
ArtifactPaths persist_artifacts(const std::string& case_id, const TriageOutcome& outcome,
                                const quantify::QuantifyResult* quant, const OutputTree& tree);

}  // namespace cxrt::triage
