// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <vector>

#include "cxrt/label.hpp"
#include "cxrt/tools/chat_client.hpp"
#include "cxrt/tools/moe.hpp"
#include "cxrt/tools/tta.hpp"
#include "cxrt/tools/vlm.hpp"

namespace cxrt::policy {

/// The verification tools available to a router for one case. Failures are
/// reported by throwing (AdapterError, VlmParseError, DataError).
class Toolbox {
 public:
  virtual ~Toolbox() = default;
  virtual tools::TtaResult tta() = 0;
  virtual tools::MoeResult moe(Label base_label) = 0;
  virtual tools::VlmResult vlm() = 0;

  /// Summaries recorded as tool-event inputs.
  virtual nlohmann::ordered_json tta_inputs() const { return nlohmann::ordered_json::object(); }
  virtual nlohmann::ordered_json moe_inputs() const { return nlohmann::ordered_json::object(); }
  virtual nlohmann::ordered_json vlm_inputs() const { return nlohmann::ordered_json::object(); }
};

/// Tools backed by live adapters for one normalized case.
class AdapterToolbox : public Toolbox {
 public:
  AdapterToolbox(const tools::CaseRecord& record, tools::ScorerPtr scorer, std::vector<tools::ScorerPtr> experts,
                 tools::ChatClientPtr vlm_client, tools::TtaOptions tta_options, int retries = tools::kDefaultRetries);

  tools::TtaResult tta() override;
  tools::MoeResult moe(Label base_label) override;
  tools::VlmResult vlm() override;
  nlohmann::ordered_json tta_inputs() const override;
  nlohmann::ordered_json moe_inputs() const override;
  nlohmann::ordered_json vlm_inputs() const override;

 private:
  const tools::CaseRecord& record_;
  tools::ScorerPtr scorer_;
  std::vector<tools::ScorerPtr> experts_;
  tools::ChatClientPtr vlm_client_;
  tools::TtaOptions tta_options_;
  int retries_;
};

/// Tools backed by callables; used for scripted tests and trace replay.
class FunctionToolbox : public Toolbox {
 public:
  std::function<tools::TtaResult()> tta_fn;
  std::function<tools::MoeResult(Label)> moe_fn;
  std::function<tools::VlmResult()> vlm_fn;

  tools::TtaResult tta() override;
  tools::MoeResult moe(Label base_label) override;
  tools::VlmResult vlm() override;
};

}  // namespace cxrt::policy
