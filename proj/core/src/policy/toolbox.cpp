// SPDX-License-Identifier: Apache-2.0
#include "cxrt/policy/toolbox.hpp"

#include "cxrt/error.hpp"

namespace cxrt::policy {

AdapterToolbox::AdapterToolbox(const tools::CaseRecord& record, tools::ScorerPtr scorer,
                               std::vector<tools::ScorerPtr> experts, tools::ChatClientPtr vlm_client,
                               tools::TtaOptions tta_options, int retries)
    : record_(record),
      scorer_(std::move(scorer)),
      experts_(std::move(experts)),
      vlm_client_(std::move(vlm_client)),
      tta_options_(tta_options),
      retries_(retries) {}

tools::TtaResult AdapterToolbox::tta() {
  if (!scorer_) throw AdapterError("no scorer configured for TTA");
  return tools::run_tta(record_, *scorer_, tta_options_);
}

tools::MoeResult AdapterToolbox::moe(Label base_label) {
  if (experts_.size() < 2) throw AdapterError("committee needs at least two experts");
  return tools::run_moe(record_, experts_, base_label, retries_);
}

tools::VlmResult AdapterToolbox::vlm() {
  if (!vlm_client_) throw AdapterError("no VLM client configured");
  return tools::run_vlm(record_, *vlm_client_);
}

nlohmann::ordered_json AdapterToolbox::tta_inputs() const {
  return {{"scorer", scorer_ ? scorer_->id() : std::string()}, {"k", tta_options_.k}, {"seed", tta_options_.seed}};
}

nlohmann::ordered_json AdapterToolbox::moe_inputs() const {
  nlohmann::ordered_json ids = nlohmann::ordered_json::array();
  for (const auto& e : experts_) ids.push_back(e->id());
  return {{"experts", std::move(ids)}};
}

nlohmann::ordered_json AdapterToolbox::vlm_inputs() const {
  return {{"model", vlm_client_ ? vlm_client_->model_id() : std::string()}};
}

tools::TtaResult FunctionToolbox::tta() {
  if (!tta_fn) throw AdapterError("tta not configured");
  return tta_fn();
}

tools::MoeResult FunctionToolbox::moe(Label base_label) {
  if (!moe_fn) throw AdapterError("moe not configured");
  return moe_fn(base_label);
}

tools::VlmResult FunctionToolbox::vlm() {
  if (!vlm_fn) throw AdapterError("vlm not configured");
  return vlm_fn();
}

}  // namespace cxrt::policy
