// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cxrt/policy/actions.hpp"

namespace cxrt::policy {

inline constexpr double kDefaultTauConf = 0.60;
inline constexpr double kDefaultTauTta = 0.05;
inline constexpr double kDefaultTauMoe = 0.75;

struct Thresholds {
  double tau_conf = kDefaultTauConf;
  double tau_tta = kDefaultTauTta;
  double tau_moe = kDefaultTauMoe;
  double tau_ood = 0.0;

  /// Throws UsageError when a value is outside its range.
  void validate() const;
};

struct AllowedActions {
  bool allow_accept = false;
  std::vector<Action> available_tools;

  bool contains(Action a) const noexcept;
};

struct GuardrailResult {
  AllowedActions allowed;
  bool ood = false;
};

/// ood = m > tau_ood; accept allowed iff not ood and c >= tau_conf.
/// Throws DataError for non-finite input, c outside [0,1] or m < 0.
GuardrailResult evaluate_guardrail(double c, double m, const Thresholds& th);

}  // namespace cxrt::policy
