// SPDX-License-Identifier: Apache-2.0
#include "cxrt/tools/moe.hpp"

#include <algorithm>

#include "cxrt/error.hpp"

namespace cxrt::tools {

MoeResult aggregate_votes(std::span<const Label> votes, Label tie_break) {
  if (votes.empty()) throw DataError("committee has no votes");
  const auto positives = std::count(votes.begin(), votes.end(), Label::positive);
  const auto negatives = static_cast<std::ptrdiff_t>(votes.size()) - positives;
  MoeResult r;
  r.votes.assign(votes.begin(), votes.end());
  if (positives > negatives) {
    r.majority = Label::positive;
  } else if (negatives > positives) {
    r.majority = Label::negative;
  } else {
    r.majority = tie_break;
  }
  const auto agreeing = r.majority == Label::positive ? positives : negatives;
  r.agreement = static_cast<double>(agreeing) / static_cast<double>(votes.size());
  return r;
}

MoeResult run_moe(const CaseRecord& record, std::span<const ScorerPtr> experts, Label base_label, int retries) {
  if (experts.size() < 2) throw DataError("mixture of experts needs at least two experts");
  std::vector<Label> votes;
  std::vector<double> posteriors;
  for (const auto& expert : experts) {
    const ConfidenceSignal s = base_score(record, *expert, retries);
    votes.push_back(s.label);
    posteriors.push_back(s.p);
  }
  MoeResult r = aggregate_votes(votes, base_label);
  r.posteriors = std::move(posteriors);
  return r;
}

}  // namespace cxrt::tools
