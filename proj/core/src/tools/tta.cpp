// SPDX-License-Identifier: Apache-2.0
#include "cxrt/tools/tta.hpp"

#include <algorithm>
#include <cmath>

#include "cxrt/error.hpp"

namespace cxrt::tools {

TtaResult summarize_tta(std::vector<double> samples) {
  if (samples.size() < 2) throw DataError("TTA needs at least two samples");
  TtaResult r;
  r.k = static_cast<int>(samples.size());
  // Spread is accumulated about the first sample.
  const double pivot = samples.front();
  double shifted = 0;
  for (double s : samples) shifted += s - pivot;
  const double mean_shift = shifted / r.k;
  double sum = 0;
  double ss = 0;
  for (double s : samples) {
    sum += s;
    ss += (s - pivot - mean_shift) * (s - pivot - mean_shift);
  }
  r.mean = sum / r.k;
  r.stddev = std::sqrt(ss / (r.k - 1));
  r.mean_confidence = std::max(r.mean, 1.0 - r.mean);
  r.samples = std::move(samples);
  return r;
}

TtaResult run_tta(const CaseRecord& record, ScorerAdapter& adapter, const TtaOptions& options) {
  if (options.k < 2) throw DataError("TTA needs k >= 2");
  const auto augmentations = draw_augmentations(options.k, options.seed);
  std::vector<double> samples;
  samples.reserve(augmentations.size());
  for (int i = 0; i < options.k; ++i) {
    const ScoringRequest request{record, augmentations[static_cast<std::size_t>(i)], i};
    const double p = with_retries(options.retries, [&] { return adapter.score(request); });
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) throw AdapterError(adapter.id() + " returned an invalid posterior");
    samples.push_back(p);
  }
  TtaResult r = summarize_tta(std::move(samples));
  r.augmentations = augmentations;
  return r;
}

}  // namespace cxrt::tools
