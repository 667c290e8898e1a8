// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cxrt/label.hpp"
#include "cxrt/tools/augment.hpp"
#include "cxrt/tools/scorer.hpp"

namespace cxrt::tools {

struct TtaResult {
  int k = 0;
  std::vector<double> samples;
  std::vector<Augmentation> augmentations;
  double mean = 0.0;
  double stddev = 0.0;           // sample standard deviation (k-1)
  double mean_confidence = 0.0;  // max(mean, 1-mean)

  Label label() const noexcept { return mean >= 0.5 ? Label::positive : Label::negative; }
};

struct TtaOptions {
  int k = 8;
  std::uint64_t seed = 0;
  int retries = kDefaultRetries;
};

/// Mean and sample standard deviation of >= 2 posteriors.
TtaResult summarize_tta(std::vector<double> samples);

/// Scores k augmentations drawn from `seed`. Any adapter failure (after
/// retries) aborts the whole batch with AdapterError.
TtaResult run_tta(const CaseRecord& record, ScorerAdapter& adapter, const TtaOptions& options);

}  // namespace cxrt::tools
