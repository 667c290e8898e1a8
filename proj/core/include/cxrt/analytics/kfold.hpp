// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cxrt/label.hpp"

namespace cxrt::analytics {

struct LabeledCase {
  std::string case_id;
  Label label = Label::negative;
};

/// Per class (negative first), shuffle with a seeded generator and deal the
/// cases round-robin into k folds. Throws DataError when k < 2 or a class
/// has fewer than k cases.
std::vector<std::vector<std::string>> stratified_kfold(std::span<const LabeledCase> cases, int k, std::uint64_t seed);

}  // namespace cxrt::analytics
