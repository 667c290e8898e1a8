// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cxrt/policy/case_session.hpp"
#include "cxrt/quantify/lwi.hpp"

namespace cxrt::triage {

inline constexpr const char* kTraceSchemaVersion = "cxrt.trace/1";

struct TraceVersions {
  std::string engine;
  std::optional<std::string> base_scorer;
  std::vector<std::string> experts;
  std::optional<std::string> vlm;
  std::string router_prompt;
  std::string vlm_prompt;
  std::optional<std::string> model_file;
};

struct Preprocessing {
  std::string format;
  int original_rows = 0;
  int original_cols = 0;
  int target_size = 0;
};

struct QuantificationSummary {
  std::string trigger;  // post_accept or implicit
  std::optional<quantify::LwiReport> lwi;
  bool cam_available = false;
};

struct ArtifactPaths {
  std::optional<std::string> destination;
  std::optional<std::string> sidecar;
  std::optional<std::string> cam_heatmap;
  std::optional<std::string> cam_overlay;
  std::optional<std::string> suppressed_image;
};

struct Latency {
  double total_ms = 0.0;
  double adapter_ms = 0.0;
  double orchestration_ms = 0.0;
};

/// Inputs for one trace file. `session` is null for cases that never
/// reached routing (quarantined or failed before scoring).
struct TraceRecord {
  std::string status = "decided";  // decided, quarantined, error
  std::string case_id;
  std::string source_file;
  std::string received;
  std::string decided;
  TraceVersions versions;
  std::string config_hash;
  std::optional<std::string> router;
  std::optional<Preprocessing> preprocessing;
  const policy::CaseSession* session = nullptr;
  std::optional<QuantificationSummary> quantification;
  ArtifactPaths artifacts;
  std::vector<std::string> notes;
  Latency latency;
  std::optional<std::string> quarantine_reason;
};

/// Serializes with a stable key order matching the published schema.
nlohmann::ordered_json trace_to_json(const TraceRecord& record);

/// Atomically writes `<out_root>/traces/<case_id>.json` and returns the path.
std::filesystem::path write_trace(const nlohmann::ordered_json& trace, const std::filesystem::path& out_root);

/// All traces under a directory, sorted by file name.
std::vector<nlohmann::json> read_traces(const std::filesystem::path& traces_dir);

}  // namespace cxrt::triage
