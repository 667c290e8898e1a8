// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cxrt/policy/guardrail.hpp"
#include "cxrt/policy/router_state.hpp"

namespace cxrt::app {

/// One adapter endpoint. transport: "stub", "http", "subprocess" or "none".
struct AdapterEndpoint {
  std::string transport = "stub";
  std::string id;
  std::string url;
  std::string command;
  std::string model;
  int timeout_ms = 30000;

  static AdapterEndpoint none() {
    AdapterEndpoint e;
    e.transport = "none";
    return e;
  }
};

struct EngineConfig {
  policy::Thresholds thresholds;  // tau_ood comes from the model file
  std::string router = "rule";    // rule or llm
  policy::PolicyMode policy_mode = policy::PolicyMode::default_mode;
  double max_auto_accept_frd_multiple = 1.0;
  int max_steps = 6;
  int workers = 1;
  int tta_k = 8;
  std::uint64_t tta_seed = 0;
  int retries = 2;

  std::string input_dir;
  std::string output_dir;
  std::string model_file;
  std::string stub_behavior;   // scripted stub outputs (see StubBehavior)
  std::string feature_table;   // runtime features when the model was fit on a table
  std::string scratch_dir = "/tmp/cxrt-scratch";

  AdapterEndpoint scorer;
  std::vector<AdapterEndpoint> experts = std::vector<AdapterEndpoint>(4);
  AdapterEndpoint vlm;
  AdapterEndpoint llm;
  AdapterEndpoint segmenter;
  AdapterEndpoint inpainter = AdapterEndpoint::none();

  int poll_ms = 500;
  int stability_ms = 1000;

  nlohmann::ordered_json to_json() const;
  /// Unknown keys are rejected. Throws UsageError.
  static EngineConfig from_json(const nlohmann::json& j);
  /// Throws UsageError when a value is out of range.
  void validate() const;
  /// sha256 of the canonical JSON snapshot.
  std::string hash() const;
};

/// Environment variables consulted by load_config and the JSON key each one sets.
const std::vector<std::pair<std::string, std::string>>& config_environment_keys();

/// Layers defaults <- file <- environment <- overrides (flags), validates, and
/// returns the result. `env` maps variable names to values.
EngineConfig load_config(const std::optional<std::string>& file, const std::map<std::string, std::string>& env,
                         const nlohmann::json& overrides);

/// CXRT_* variables from the process environment.
std::map<std::string, std::string> process_environment();

}  // namespace cxrt::app
