// SPDX-License-Identifier: Apache-2.0
#include "cxrt/triage/artifacts.hpp"

#include "cxrt/encoding.hpp"
#include "cxrt/image_io.hpp"

namespace cxrt::triage {

ArtifactPaths persist_artifacts(const std::string& case_id, const TriageOutcome& outcome,
                                const quantify::QuantifyResult* quant, const OutputTree& tree) {
  ArtifactPaths paths;
  if (!quant || outcome.decision != Decision::accept || outcome.final_label != Label::positive) return paths;
  const fs::path dir = tree.artifacts(case_id);
  fs::create_directories(dir);
  if (quant->cam) {
    const fs::path heat = dir / "cam_heatmap.png";
    write_file_atomic(heat.string(), encode_png(to_gray8(quant->cam->native), {}, PngCompression::stored));
    paths.cam_heatmap = heat.string();
    const fs::path overlay = dir / "cam_overlay.png";
    write_file_atomic(overlay.string(), encode_png(quant->cam->overlay, PngCompression::stored));
    paths.cam_overlay = overlay.string();
  }
  if (quant->suppressed) {
    const fs::path sup = dir / "suppressed.png";
    write_file_atomic(sup.string(), encode_png(to_gray8(*quant->suppressed), {}, PngCompression::stored));
    paths.suppressed_image = sup.string();
  }
  return paths;
}

}  // namespace cxrt::triage
