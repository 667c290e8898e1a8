// SPDX-License-Identifier: Apache-2.0
#include "cxrt/triage/trace.hpp"

#include <algorithm>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"

namespace cxrt::triage {

using nlohmann::ordered_json;

namespace {

ordered_json opt(const std::optional<std::string>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json label_or_null(const std::optional<Label>& l) {
  return l ? ordered_json(to_pe_string(*l)) : ordered_json(nullptr);
}

}  // namespace

ordered_json trace_to_json(const TraceRecord& rec) {
  const policy::CaseSession* s = rec.session;
  ordered_json j;
  j["schema_version"] = kTraceSchemaVersion;
  j["status"] = rec.status;
  j["case_id"] = rec.case_id;
  j["source_file"] = rec.source_file;
  j["timestamps"] = {{"received", rec.received}, {"decided", rec.decided}};
  j["versions"] = {{"engine", rec.versions.engine},
                   {"base_scorer", opt(rec.versions.base_scorer)},
                   {"experts", rec.versions.experts},
                   {"vlm", opt(rec.versions.vlm)},
                   {"router_prompt", rec.versions.router_prompt},
                   {"vlm_prompt", rec.versions.vlm_prompt},
                   {"model_file", opt(rec.versions.model_file)}};
  j["config_hash"] = rec.config_hash;
  j["router"] = opt(rec.router);
  if (rec.preprocessing) {
    j["preprocessing"] = {{"format", rec.preprocessing->format},
                          {"original_rows", rec.preprocessing->original_rows},
                          {"original_cols", rec.preprocessing->original_cols},
                          {"resize", "bilinear"},
                          {"target_size", rec.preprocessing->target_size}};
  } else {
    j["preprocessing"] = nullptr;
  }

  ordered_json events = ordered_json::array();
  ordered_json decisions = ordered_json::array();
  ordered_json violations = ordered_json::array();
  std::vector<std::string> notes;
  if (s) {
    const auto& th = s->thresholds();
    const auto& sig = s->signals();
    j["thresholds"] = {{"tau_conf", th.tau_conf}, {"tau_tta", th.tau_tta}, {"tau_moe", th.tau_moe}, {"tau_ood", th.tau_ood}};
    j["signals"] = {{"p", sig.base.p},
                    {"c", sig.base.c},
                    {"base_label", to_string(sig.base.label)},
                    {"frd_maha", sig.frd_maha},
                    {"thr_maha", sig.thr_maha},
                    {"is_ood", s->guardrail().ood},
                    {"ridge_lambda", sig.ridge_lambda}};
    for (const auto& e : s->tool_events()) {
      events.push_back({{"seq", e.seq},
                        {"tool", e.tool},
                        {"ok", e.ok},
                        {"started_at", e.started_at},
                        {"duration_ms", e.duration_ms},
                        {"inputs", e.inputs},
                        {"outputs", e.outputs},
                        {"error", opt(e.error)}});
    }
    for (const auto& d : s->decisions()) {
      decisions.push_back({{"step", d.step},
                           {"next_tool", policy::to_string(d.next_tool)},
                           {"reason", d.reason},
                           {"stop", d.stop},
                           {"final_label", label_or_null(d.final_label)},
                           {"decided_by", policy::to_string(d.decided_by)}});
    }
    for (const auto& v : s->violations()) {
      violations.push_back({{"step", v.step}, {"kind", v.kind}, {"detail", v.detail}});
    }
    notes = s->notes();
  } else {
    j["thresholds"] = nullptr;
    j["signals"] = nullptr;
  }
  j["tool_events"] = std::move(events);
  j["decisions"] = std::move(decisions);
  j["violations"] = std::move(violations);
  j["decision"] = s && s->outcome() ? s->outcome()->to_json() : ordered_json(nullptr);
  if (rec.quantification) {
    j["quantification"] = {{"trigger", rec.quantification->trigger},
                           {"lwi", rec.quantification->lwi ? rec.quantification->lwi->to_json() : ordered_json(nullptr)},
                           {"cam_available", rec.quantification->cam_available}};
  } else {
    j["quantification"] = nullptr;
  }
  j["artifacts"] = {{"destination", opt(rec.artifacts.destination)},
                    {"sidecar", opt(rec.artifacts.sidecar)},
                    {"cam_heatmap", opt(rec.artifacts.cam_heatmap)},
                    {"cam_overlay", opt(rec.artifacts.cam_overlay)},
                    {"suppressed_image", opt(rec.artifacts.suppressed_image)}};
  notes.insert(notes.end(), rec.notes.begin(), rec.notes.end());
  j["notes"] = notes;
  j["latency"] = {{"total_ms", rec.latency.total_ms},
                  {"adapter_ms", rec.latency.adapter_ms},
                  {"orchestration_ms", rec.latency.orchestration_ms}};
  j["quarantine_reason"] = opt(rec.quarantine_reason);
  return j;
}

std::filesystem::path write_trace(const ordered_json& trace, const std::filesystem::path& out_root) {
  const std::string case_id = trace.at("case_id").get<std::string>();
  if (case_id.empty() || case_id.find('/') != std::string::npos) throw DataError("invalid case id for trace");
  const auto dir = out_root / "traces";
  std::filesystem::create_directories(dir);
  const auto path = dir / (case_id + ".json");
  write_file_atomic(path.string(), trace.dump(2) + "\n");
  return path;
}

std::vector<nlohmann::json> read_traces(const std::filesystem::path& traces_dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(traces_dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) throw DataError("cannot read traces directory " + traces_dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<nlohmann::json> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    try {
      out.push_back(nlohmann::json::parse(read_text_file(f.string())));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("trace " + f.string() + " is not valid JSON: " + e.what());
    }
  }
  return out;
}

}  // namespace cxrt::triage
