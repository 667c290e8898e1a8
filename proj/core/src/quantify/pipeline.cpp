// SPDX-License-Identifier: Apache-2.0
#include "cxrt/quantify/pipeline.hpp"

#include "cxrt/error.hpp"

namespace cxrt::quantify {

QuantifyResult quantify_case(const CaseRecord& record, const QuantifyAdapters& adapters,
                             tools::ScorerAdapter* cam_scorer) {
  QuantifyResult out;
  std::optional<FetchedMasks> fetched;
  try {
    fetched = fetch_masks(record, adapters.segmentation);
  } catch (const Error& e) {
    out.notes.push_back("lung_seg_unavailable");
  }
  if (fetched) {
    out.notes.insert(out.notes.end(), fetched->notes.begin(), fetched->notes.end());
    const MaskSet& m = fetched->masks;
    try {
      const Image ribs = suppress_ribs(record.pixels, m.rib, &m.lung);
      DeviceSuppression dev = suppress_devices(ribs, m.device, adapters.inpainter.get(), &m.lung);
      if (dev.warning) out.notes.push_back("device_inpaint_fallback: " + *dev.warning);
      LwiReport report = compute_lwi(dev.image, m.lung);
      report.lambda_fill_events = dev.fill_events;
      report.suppression_chain = {"rib_annulus_fill", "device_" + dev.method};
      out.lwi = std::move(report);
      out.suppressed = std::move(dev.image);
    } catch (const DataError& e) {
      out.notes.push_back(std::string("lwi_unavailable: ") + e.what());
    }
  }
  if (cam_scorer) {
    CamOutcome cam = build_cam_artifact(record, *cam_scorer);
    out.notes.insert(out.notes.end(), cam.notes.begin(), cam.notes.end());
    out.cam = std::move(cam.artifact);
  } else {
    out.notes.push_back("cam_unavailable");
  }
  return out;
}

}  // namespace cxrt::quantify
