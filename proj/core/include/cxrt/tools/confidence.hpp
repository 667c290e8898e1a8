// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cxrt/label.hpp"

namespace cxrt::tools {

/// Base-classifier output: posterior p = P(positive | x), max-class
/// confidence c = max(p, 1-p), and label positive iff p >= 0.5.
struct ConfidenceSignal {
  double p = 0.5;
  double c = 0.5;
  Label label = Label::positive;
};

/// Throws DataError unless p is finite and in [0,1].
ConfidenceSignal derive_confidence(double p);

}  // namespace cxrt::tools
