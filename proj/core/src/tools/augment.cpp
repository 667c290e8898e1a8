// SPDX-License-Identifier: Apache-2.0
#include "cxrt/tools/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "cxrt/resample.hpp"

namespace cxrt::tools {

std::vector<Augmentation> draw_augmentations(int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(0.5);
  std::uniform_real_distribution<double> rotation(-5.0, 5.0);
  std::uniform_real_distribution<double> contrast(0.9, 1.1);
  std::vector<Augmentation> out;
  out.reserve(static_cast<std::size_t>(std::max(k, 0)));
  for (int i = 0; i < k; ++i) {
    Augmentation a;
    a.hflip = flip(rng);
    a.rotation_deg = rotation(rng);
    a.contrast = contrast(rng);
    out.push_back(a);
  }
  return out;
}

Image apply_augmentation(const Image& image, const Augmentation& aug) {
  const int rows = image.rows();
  const int cols = image.cols();
  Image flipped = image;
  if (aug.hflip) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) flipped(r, c) = image(r, cols - 1 - c);
    }
  }

  Image rotated = flipped;
  if (aug.rotation_deg != 0.0) {
    const double theta = aug.rotation_deg * std::numbers::pi / 180.0;
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double cy = (rows - 1) / 2.0;
    const double cx = (cols - 1) / 2.0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        // Inverse map: rotate output coordinates by -theta into the source.
        const double dy = r - cy;
        const double dx = c - cx;
        const double sy = cos_t * dy - sin_t * dx + cy;
        const double sx = sin_t * dy + cos_t * dx + cx;
        rotated(r, c) = sample_bilinear(flipped, sy, sx);
      }
    }
  }

  if (aug.contrast != 1.0 && !rotated.empty()) {
    auto v = rotated.values();
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x = std::clamp(mean + aug.contrast * (x - mean), 0.0, 1.0);
  }
  return rotated;
}

}  // namespace cxrt::tools
