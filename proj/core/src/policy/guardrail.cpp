// SPDX-License-Identifier: Apache-2.0
#include "cxrt/policy/guardrail.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cxrt/error.hpp"

namespace cxrt::policy {

void Thresholds::validate() const {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in_unit(tau_conf)) throw UsageError("tau_conf must be in [0,1], got " + std::to_string(tau_conf));
  if (!in_unit(tau_moe)) throw UsageError("tau_moe must be in [0,1], got " + std::to_string(tau_moe));
  if (!std::isfinite(tau_tta) || tau_tta < 0.0) throw UsageError("tau_tta must be >= 0");
  if (!std::isfinite(tau_ood) || tau_ood < 0.0) throw UsageError("tau_ood must be >= 0");
}

bool AllowedActions::contains(Action a) const noexcept {
  return std::find(available_tools.begin(), available_tools.end(), a) != available_tools.end();
}

GuardrailResult evaluate_guardrail(double c, double m, const Thresholds& th) {
  if (!std::isfinite(c) || c < 0.0 || c > 1.0) throw DataError("guardrail: confidence must be in [0,1]");
  if (!std::isfinite(m) || m < 0.0) throw DataError("guardrail: Mahalanobis score must be finite and >= 0");
  GuardrailResult r;
  r.ood = m > th.tau_ood;
  r.allowed.allow_accept = !r.ood && c >= th.tau_conf;
  if (r.allowed.allow_accept) r.allowed.available_tools.push_back(Action::accept);
  for (Action a : {Action::tta, Action::moe, Action::vlm}) r.allowed.available_tools.push_back(a);
  return r;
}

}  // namespace cxrt::policy
