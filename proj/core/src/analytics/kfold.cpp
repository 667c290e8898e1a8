// SPDX-License-Identifier: Apache-2.0
#include "cxrt/analytics/kfold.hpp"

#include <algorithm>
#include <random>

#include "cxrt/error.hpp"

namespace cxrt::analytics {

std::vector<std::vector<std::string>> stratified_kfold(std::span<const LabeledCase> cases, int k, std::uint64_t seed) {
  if (k < 2) throw DataError("k-fold needs k >= 2");
  std::vector<std::string> by_class[2];
  for (const auto& c : cases) by_class[c.label == Label::positive ? 1 : 0].push_back(c.case_id);
  for (const auto& ids : by_class) {
    if (static_cast<int>(ids.size()) < k) {
      throw DataError("each class needs at least k=" + std::to_string(k) + " cases, got " + std::to_string(ids.size()));
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(k));
  for (auto& ids : by_class) {
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t i = 0; i < ids.size(); ++i) folds[i % static_cast<std::size_t>(k)].push_back(ids[i]);
  }
  return folds;
}

}  // namespace cxrt::analytics
