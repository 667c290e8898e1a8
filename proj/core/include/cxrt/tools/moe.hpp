// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "cxrt/label.hpp"
#include "cxrt/tools/scorer.hpp"

namespace cxrt::tools {

struct MoeResult {
  std::vector<Label> votes;
  std::vector<double> posteriors;
  Label majority = Label::positive;
  double agreement = 0.0;  // votes equal to majority / experts

  int experts() const noexcept { return static_cast<int>(votes.size()); }
};

/// Majority vote; an exact tie resolves to `tie_break` (the base classifier's label).
MoeResult aggregate_votes(std::span<const Label> votes, Label tie_break);

/// Each expert votes its max-class label. Needs >= 2 experts; an unreachable
/// expert (after retries) fails the committee with AdapterError.
MoeResult run_moe(const CaseRecord& record, std::span<const ScorerPtr> experts, Label base_label,
                  int retries = kDefaultRetries);

}  // namespace cxrt::tools
