// SPDX-License-Identifier: Apache-2.0
#include "cxrt/quantify/suppression.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "cxrt/error.hpp"

namespace cxrt::quantify {

double median_of(std::vector<double> values) {
  if (values.empty()) throw DataError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Image annulus_fill(const Image& image, const Mask& mask, const Mask* lung) {
  if (!image.same_shape(mask)) throw DataError("mask shape does not match the image");
  if (lung && !image.same_shape(*lung)) throw DataError("lung mask shape does not match the image");
  const int rows = image.rows();
  const int cols = image.cols();
  const auto masked = static_cast<std::size_t>(std::count_if(mask.values().begin(), mask.values().end(),
                                                             [](std::uint8_t v) { return v != 0; }));
  Image out = image;
  if (masked == 0) return out;
  if (masked == mask.size()) throw DataError("degenerate mask");

  std::vector<std::pair<int, int>> disk;
  for (int dy = -kAnnulusRadius; dy <= kAnnulusRadius; ++dy) {
    for (int dx = -kAnnulusRadius; dx <= kAnnulusRadius; ++dx) {
      if ((dy != 0 || dx != 0) && dy * dy + dx * dx <= kAnnulusRadius * kAnnulusRadius) disk.emplace_back(dy, dx);
    }
  }

  std::optional<double> fallback;
  auto fallback_value = [&] {
    if (fallback) return *fallback;
    std::vector<double> in_lung;
    std::vector<double> all;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (mask(r, c)) continue;
        all.push_back(image(r, c));
        if (lung && (*lung)(r, c)) in_lung.push_back(image(r, c));
      }
    }
    fallback = median_of(in_lung.empty() ? std::move(all) : std::move(in_lung));
    return *fallback;
  };

  std::vector<std::ptrdiff_t> disk_offsets;
  for (const auto& [dy, dx] : disk) disk_offsets.push_back(static_cast<std::ptrdiff_t>(dy) * cols + dx);
  const std::uint8_t* m = mask.values().data();
  const double* src = image.values().data();
  double* dst = out.values().data();

  std::vector<std::uint32_t> component(mask.size(), 0);
  std::vector<std::uint32_t> stamp(mask.size(), 0);
  std::uint32_t label = 0;
  std::vector<std::size_t> pixels;
  std::vector<double> ring;
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  for (std::size_t start = 0; start < n; ++start) {
    if (!m[start] || component[start] != 0) continue;
    ++label;
    pixels.clear();
    pixels.push_back(start);
    component[start] = label;
    for (std::size_t head = 0; head < pixels.size(); ++head) {
      const std::size_t k = pixels[head];
      const int r = static_cast<int>(k / static_cast<std::size_t>(cols));
      const int c = static_cast<int>(k % static_cast<std::size_t>(cols));
      for (int dy = -1; dy <= 1; ++dy) {
        const int rr = r + dy;
        if (rr < 0 || rr >= rows) continue;
        for (int dx = -1; dx <= 1; ++dx) {
          const int cc = c + dx;
          if (cc < 0 || cc >= cols) continue;
          const std::size_t q = static_cast<std::size_t>(rr) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(cc);
          if (!m[q] || component[q] != 0) continue;
          component[q] = label;
          pixels.push_back(q);
        }
      }
    }
    ring.clear();
    for (const std::size_t k : pixels) {
      const int r = static_cast<int>(k / static_cast<std::size_t>(cols));
      const int c = static_cast<int>(k % static_cast<std::size_t>(cols));
      const bool interior = r >= kAnnulusRadius && r < rows - kAnnulusRadius && c >= kAnnulusRadius &&
                            c < cols - kAnnulusRadius;
      for (std::size_t d = 0; d < disk.size(); ++d) {
        if (!interior) {
          const int rr = r + disk[d].first;
          const int cc = c + disk[d].second;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
        }
        const auto q = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(k) + disk_offsets[d]);
        if (m[q] || stamp[q] == label) continue;
        stamp[q] = label;
        ring.push_back(src[q]);
      }
    }
    const double value = ring.empty() ? fallback_value() : median_of(ring);
    for (const std::size_t k : pixels) dst[k] = value;
  }
  return out;
}

Image suppress_ribs(const Image& image, const Mask& rib_mask, const Mask* lung) {
  return annulus_fill(image, rib_mask, lung);
}

DeviceSuppression suppress_devices(const Image& image, const Mask& device_mask, InpaintAdapter* adapter,
                                   const Mask* lung) {
  if (!image.same_shape(device_mask)) throw DataError("device mask shape does not match the image");
  DeviceSuppression out;
  const bool any = std::any_of(device_mask.values().begin(), device_mask.values().end(),
                               [](std::uint8_t v) { return v != 0; });
  if (!any) {
    out.image = image;
    out.method = "none";
    return out;
  }
  if (adapter) {
    try {
      const Image painted = adapter->inpaint(image, device_mask);
      if (!painted.same_shape(image)) {
        out.warning = "inpainter returned " + std::to_string(painted.rows()) + "x" + std::to_string(painted.cols());
      } else {
        out.image = image;
        auto dst = out.image.values();
        const auto src = painted.values();
        const auto m = device_mask.values();
        for (std::size_t i = 0; i < dst.size(); ++i) {
          if (m[i]) dst[i] = std::isfinite(src[i]) ? std::clamp(src[i], 0.0, 1.0) : 0.0;
        }
        out.method = "inpaint";
        return out;
      }
    } catch (const Error& e) {
      out.warning = std::string("inpainter failed: ") + e.what();
    }
  }
  out.image = annulus_fill(image, device_mask, lung);
  out.method = "annulus_fill";
  out.fill_events = 1;
  return out;
}

}  // namespace cxrt::quantify
