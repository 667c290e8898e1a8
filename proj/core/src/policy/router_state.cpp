// SPDX-License-Identifier: Apache-2.0
#include "cxrt/policy/router_state.hpp"

#include <algorithm>

namespace cxrt::policy {

std::string_view to_string(PolicyMode m) noexcept {
  switch (m) {
    case PolicyMode::default_mode: return "default";
    case PolicyMode::conservative: return "conservative";
    case PolicyMode::sensitive: return "sensitive";
  }
  return "default";
}

std::optional<PolicyMode> parse_policy_mode(std::string_view text) noexcept {
  if (text == "default") return PolicyMode::default_mode;
  if (text == "conservative") return PolicyMode::conservative;
  if (text == "sensitive") return PolicyMode::sensitive;
  return std::nullopt;
}

RouterPolicy RouterPolicy::from_thresholds(const Thresholds& th, PolicyMode mode, double max_auto_accept_frd_multiple) {
  return RouterPolicy{mode, th.tau_conf, th.tau_tta, th.tau_moe, max_auto_accept_frd_multiple};
}

bool RouterState::available(Action a) const noexcept {
  return std::find(available_tools.begin(), available_tools.end(), a) != available_tools.end();
}

nlohmann::ordered_json RouterState::to_json() const {
  using nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json j;
  j["p"] = p;
  j["frd_maha"] = frd_maha;
  j["thr_maha"] = thr_maha;
  j["tta_std"] = opt(tta_std);
  j["moe_a"] = opt(moe_a);
  j["in_domain"] = in_domain;
  j["policy"] = {{"mode", to_string(policy.mode)},
                 {"p_accept", policy.p_accept},
                 {"std_ok", policy.std_ok},
                 {"moe_thr", policy.moe_thr},
                 {"max_auto_accept_frd_multiple", policy.max_auto_accept_frd_multiple}};
  j["already_ran"] = {{"tta", ran_tta}, {"moe", ran_moe}, {"vlm", ran_vlm}};
  ordered_json tools = ordered_json::array();
  for (Action a : available_tools) tools.push_back(to_string(a));
  j["available_tools"] = std::move(tools);
  j["accepted"] = accepted;
  j["final_label"] = final_label ? ordered_json(to_pe_string(*final_label)) : ordered_json(nullptr);
  return j;
}

RouterState build_router_state(const CaseSession& session, const RouterPolicy& policy) {
  const CaseSignals& sig = session.signals();
  RouterState s;
  s.p = session.current_p();
  s.frd_maha = sig.frd_maha;
  s.thr_maha = sig.thr_maha;
  if (session.tta()) s.tta_std = session.tta()->stddev;
  if (session.moe()) s.moe_a = session.moe()->agreement;
  s.in_domain = sig.frd_maha <= sig.thr_maha;
  s.policy = policy;
  s.ran_tta = session.ran(Action::tta);
  s.ran_moe = session.ran(Action::moe);
  s.ran_vlm = session.ran(Action::vlm);
  s.accepted = session.accepted();
  s.final_label = session.accepted_label();
  if (s.accepted) {
    if (s.final_label == Label::positive) s.available_tools.push_back(Action::post_accept);
  } else {
    if (session.accept_allowed()) s.available_tools.push_back(Action::accept);
    for (Action a : {Action::tta, Action::moe, Action::vlm}) {
      if (!session.ran(a)) s.available_tools.push_back(a);
    }
  }
  return s;
}

}  // namespace cxrt::policy
