// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string_view>
#include <vector>

#include "cxrt/label.hpp"
#include "cxrt/policy/case_session.hpp"

namespace cxrt::policy {

enum class PolicyMode { default_mode, conservative, sensitive };

std::string_view to_string(PolicyMode m) noexcept;
std::optional<PolicyMode> parse_policy_mode(std::string_view text) noexcept;

/// The STATE.policy block. `max_auto_accept_frd_multiple` is reported but
/// not acted on.
struct RouterPolicy {
  PolicyMode mode = PolicyMode::default_mode;
  double p_accept = kDefaultTauConf;
  double std_ok = kDefaultTauTta;
  double moe_thr = kDefaultTauMoe;
  double max_auto_accept_frd_multiple = 1.0;

  static RouterPolicy from_thresholds(const Thresholds& th, PolicyMode mode = PolicyMode::default_mode,
                                      double max_auto_accept_frd_multiple = 1.0);
};

struct RouterState {
  double p = 0.0;
  double frd_maha = 0.0;
  double thr_maha = 0.0;
  std::optional<double> tta_std;
  std::optional<double> moe_a;
  bool in_domain = true;
  RouterPolicy policy;
  bool ran_tta = false;
  bool ran_moe = false;
  bool ran_vlm = false;
  std::vector<Action> available_tools;
  bool accepted = false;
  std::optional<Label> final_label;

  bool available(Action a) const noexcept;
  /// Keys and nesting as in the router prompt; absent values as null.
  nlohmann::ordered_json to_json() const;
};

/// Before acceptance: accept (when permitted) plus every verification tool
/// not yet run. After acceptance: POST_ACCEPT for a positive label, else nothing.
RouterState build_router_state(const CaseSession& session, const RouterPolicy& policy);

}  // namespace cxrt::policy
