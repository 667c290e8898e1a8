// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cxrt/label.hpp"
#include "cxrt/tools/chat_client.hpp"
#include "cxrt/tools/scorer.hpp"

namespace cxrt::app {

/// Scripted adapter outputs for one synthetic case.
struct StubCase {
  std::string file;
  Label truth = Label::negative;
  Label predicted = Label::negative;
  double p = 0.5;
  std::optional<std::vector<double>> tta;  // nullopt: every TTA call fails
  std::vector<double> moe;                 // one posterior per expert
  std::string vlm;                         // raw chat reply
  std::string band;
  bool ood = false;
  bool planted_correct = false;

  nlohmann::ordered_json to_json() const;
  static StubCase from_json(const nlohmann::json& j);
};

/// Scripted behavior keyed by case_id.
class StubBehavior {
 public:
  StubBehavior() = default;
  explicit StubBehavior(std::map<std::string, StubCase> cases) : cases_(std::move(cases)) {}

  static StubBehavior load(const std::string& path);
  void save(const std::string& path) const;

  /// Throws AdapterError for unknown cases.
  const StubCase& at(const std::string& case_id) const;
  const std::map<std::string, StubCase>& cases() const noexcept { return cases_; }

  nlohmann::ordered_json to_json() const;

 private:
  std::map<std::string, StubCase> cases_;
};

using StubBehaviorPtr = std::shared_ptr<const StubBehavior>;

/// Base scorer replaying `p` for the plain image and `tta[sample_index]` for
/// augmented samples. CAM maps come from the intensity stub.
tools::ScorerPtr make_scripted_scorer(StubBehaviorPtr behavior);

/// Expert i replays `moe[i]`.
std::vector<tools::ScorerPtr> make_scripted_experts(StubBehaviorPtr behavior, int count);

/// Replays the scripted VLM reply for ChatRequest::case_id.
tools::ChatClientPtr make_scripted_vlm(StubBehaviorPtr behavior);

/// Pixel-driven stand-ins used when no script is configured.
std::vector<tools::ScorerPtr> make_intensity_experts(int count);
tools::ChatClientPtr make_intensity_vlm();

/// Chat client that answers router prompts the way the rule router would.
tools::ChatClientPtr make_rule_mimic_llm();

}  // namespace cxrt::app
