// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cxrt/app/config.hpp"
#include "cxrt/features/feature_table.hpp"
#include "cxrt/ingestion/case_record.hpp"
#include "cxrt/ingestion/raw_case.hpp"
#include "cxrt/ood/model_file.hpp"
#include "cxrt/quantify/pipeline.hpp"
#include "cxrt/tools/chat_client.hpp"
#include "cxrt/tools/scorer.hpp"
#include "cxrt/triage/dispose.hpp"
#include "cxrt/triage/outcome.hpp"
#include "cxrt/triage/trace.hpp"

namespace cxrt::app {

struct EngineAdapters {
  tools::ScorerPtr scorer;
  std::vector<tools::ScorerPtr> experts;
  tools::ChatClientPtr vlm;
  tools::ChatClientPtr llm;
  quantify::QuantifyAdapters quantify;
};

/// Serves large image buffers from the heap so they are recycled across
/// cases. Call once at startup; a no-op outside glibc.
void tune_allocator() noexcept;

/// Adapters named by the config, each wrapped so its time is charged to
/// adapter latency. Throws UsageError for unusable endpoint settings.
EngineAdapters build_adapters(const EngineConfig& config);

/// Result of one case, as reported to batch and watch loops.
struct CaseReport {
  std::string case_id;
  std::string status;  // decided, quarantined, error
  std::optional<triage::TriageOutcome> outcome;
  triage::Destination destination = triage::Destination::holding;
  triage::Latency latency;
  std::filesystem::path trace_path;
};

/// Stage I-IV for single files. Immutable after construction, so one engine
/// serves any number of worker threads.
class Engine {
 public:
  Engine(EngineConfig config, ood::ModelBundle model, EngineAdapters adapters,
         std::optional<features::FeatureTable> feature_table = std::nullopt);

  /// Loads the model file (refusing to start without one), the optional
  /// feature table and the configured adapters.
  static Engine from_config(const EngineConfig& config);

  const EngineConfig& config() const noexcept { return config_; }
  const std::string& config_hash() const noexcept { return config_hash_; }
  const ood::ModelBundle& model() const noexcept { return model_; }
  const triage::OutputTree& output() const noexcept { return tree_; }

  /// Reads, then processes, a file; unreadable inputs are quarantined.
  CaseReport process_path(const std::filesystem::path& path, ingestion::CaseIdAllocator& ids) const;
  CaseReport process_raw(const ingestion::RawCase& raw, ingestion::CaseIdAllocator& ids) const;
  /// Moves a file the watcher rejected into quarantine and traces it.
  CaseReport quarantine(const std::filesystem::path& path, const std::string& reason,
                        ingestion::CaseIdAllocator& ids) const;

 private:
  features::RawFeatureVector features_for(const ingestion::CaseRecord& record) const;
  triage::TraceVersions versions() const;
  CaseReport quarantine_impl(const std::filesystem::path& path, const std::string& reason, const std::string& case_id,
                             const std::string& received, double adapter_before,
                             std::chrono::steady_clock::time_point start) const;

  EngineConfig config_;
  std::string config_hash_;
  ood::ModelBundle model_;
  std::string model_version_;
  EngineAdapters adapters_;
  std::unordered_map<std::string, features::RawFeatureVector> table_rows_;
  triage::OutputTree tree_;
};

}  // namespace cxrt::app
