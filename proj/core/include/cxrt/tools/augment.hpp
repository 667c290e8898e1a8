// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "cxrt/grid.hpp"

namespace cxrt::tools {

/// One benign perturbation: optional horizontal flip, rotation about the image
/// centre, and contrast scaling about the mean intensity.
struct Augmentation {
  bool hflip = false;
  double rotation_deg = 0.0;
  double contrast = 1.0;

  bool operator==(const Augmentation&) const = default;
};

/// k draws from a generator seeded with `seed`: flip with probability 0.5,
/// rotation uniform in [-5, 5] degrees, contrast uniform in [0.9, 1.1].
std::vector<Augmentation> draw_augmentations(int k, std::uint64_t seed);

/// Flip, then rotate (bilinear, border clamped), then contrast about the
/// mean, clamped to [0,1].
Image apply_augmentation(const Image& image, const Augmentation& aug);

}  // namespace cxrt::tools
