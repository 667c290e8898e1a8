// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>
#include <stop_token>
#include <string>
#include <vector>

#include "cxrt/app/engine.hpp"
#include "cxrt/app/evaluate.hpp"

namespace cxrt::app {

struct RunSummary {
  int cases = 0;
  OutcomeCounts counts;
  double mean_total_ms = 0.0;
  double mean_adapter_ms = 0.0;
  double mean_orchestration_ms = 0.0;  // excludes time inside adapters
  std::vector<std::string> failures;   // cases that could not be traced at all
  std::vector<CaseReport> reports;     // in input order

  void add(const CaseReport& report);
  void finish();
  nlohmann::ordered_json to_json() const;
};

using CaseCallback = std::function<void(const CaseReport&)>;

/// Processes every regular, non-hidden file in `input_dir` with
/// `engine.config().workers` threads and returns once all are disposed.
RunSummary run_batch(const Engine& engine, const std::filesystem::path& input_dir, const CaseCallback& on_case = {});

/// Watches the configured input folder until `stop` is requested, then
/// finishes every case already handed to the workers before returning.
RunSummary watch_folder(const Engine& engine, std::stop_token stop, const CaseCallback& on_case = {});

}  // namespace cxrt::app
