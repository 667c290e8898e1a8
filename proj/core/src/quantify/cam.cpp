// SPDX-License-Identifier: Apache-2.0
#include "cxrt/quantify/cam.hpp"

#include <algorithm>
#include <cmath>

#include "cxrt/error.hpp"
#include "cxrt/resample.hpp"

namespace cxrt::quantify {

Image normalize_heatmap(const Image& raw) {
  if (raw.empty()) throw DataError("empty heatmap");
  const auto [lo, hi] = std::minmax_element(raw.values().begin(), raw.values().end());
  const double min = *lo;
  const double range = *hi - *lo;
  Image out(raw.rows(), raw.cols(), 0.0);
  if (range <= 0.0) return out;
  auto dst = out.values();
  const auto src = raw.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::clamp((src[i] - min) / range, 0.0, 1.0);
  return out;
}

namespace {

inline std::array<double, 3> jet_inline(double v) noexcept {
  v = std::clamp(v, 0.0, 1.0);
  auto ch = [v](double center) { return std::clamp(1.5 - std::abs(4.0 * v - center), 0.0, 1.0); };
  return {ch(3.0), ch(2.0), ch(1.0)};
}

}  // namespace

std::array<double, 3> jet(double v) noexcept { return jet_inline(v); }

RgbImage overlay_heatmap(const Image& gray, const Image& heatmap) {
  if (!gray.same_shape(heatmap)) throw DataError("heatmap shape does not match the image");
  RgbImage out{gray.rows(), gray.cols(), std::vector<std::uint8_t>(gray.size() * 3)};
  const auto g = gray.values();
  const auto h = heatmap.values();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto color = jet_inline(h[i]);
    const double base = 0.6 * std::clamp(g[i], 0.0, 1.0);
    for (std::size_t k = 0; k < 3; ++k) {
      const double v = base + 0.4 * color[k];  // in [0,1]
      out.rgb[i * 3 + k] = static_cast<std::uint8_t>(v * 255.0 + 0.5);
    }
  }
  return out;
}

CamArtifact make_cam_artifact(const Image& gray, const Image& raw_heatmap) {
  if (raw_heatmap.empty()) throw DataError("empty heatmap");
  for (double v : raw_heatmap.values()) {
    if (!std::isfinite(v)) throw DataError("heatmap has non-finite values");
  }
  const Image up = resize_bilinear(raw_heatmap, gray.rows(), gray.cols());
  CamArtifact a;
  a.native = normalize_heatmap(raw_heatmap);
  a.heatmap = normalize_heatmap(up);
  a.overlay = overlay_heatmap(gray, a.heatmap);
  return a;
}

CamOutcome build_cam_artifact(const tools::CaseRecord& record, tools::ScorerAdapter& scorer) {
  CamOutcome out;
  if (!scorer.capabilities().cam) {
    out.notes.push_back("cam_unavailable");
    return out;
  }
  std::optional<Image> raw;
  try {
    raw = scorer.cam(record);
  } catch (const Error& e) {
    out.notes.push_back(std::string("cam_unavailable: ") + e.what());
    return out;
  }
  if (!raw) {
    out.notes.push_back("cam_unavailable");
    return out;
  }
  try {
    out.artifact = make_cam_artifact(record.pixels, *raw);
  } catch (const DataError& e) {
    out.notes.push_back(std::string("cam_malformed: ") + e.what());
  }
  return out;
}

}  // namespace cxrt::quantify
