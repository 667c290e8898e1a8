// SPDX-License-Identifier: Apache-2.0
#include "cxrt/app/engine.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <charconv>
#include <chrono>

#include "cxrt/app/stub_behavior.hpp"
#include "cxrt/assets.hpp"
#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"
#include "cxrt/policy/case_session.hpp"
#include "cxrt/policy/router.hpp"
#include "cxrt/policy/toolbox.hpp"
#include "cxrt/tools/adapter_clock.hpp"
#include "cxrt/triage/artifacts.hpp"

namespace cxrt::app {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;
using nlohmann::ordered_json;

namespace {

class TimedSegmenter : public quantify::SegmentationAdapter {
 public:
  explicit TimedSegmenter(quantify::SegmenterPtr inner) : inner_(std::move(inner)) {}
  std::string id() const override { return inner_->id(); }
  Mask segment(const ingestion::CaseRecord& record, quantify::MaskTarget target) override {
    tools::AdapterTimer t;
    return inner_->segment(record, target);
  }

 private:
  quantify::SegmenterPtr inner_;
};

class TimedInpainter : public quantify::InpaintAdapter {
 public:
  explicit TimedInpainter(quantify::InpainterPtr inner) : inner_(std::move(inner)) {}
  std::string id() const override { return inner_->id(); }
  Image inpaint(const Image& image, const Mask& mask) override {
    tools::AdapterTimer t;
    return inner_->inpaint(image, mask);
  }

 private:
  quantify::InpainterPtr inner_;
};

std::chrono::milliseconds timeout_of(const AdapterEndpoint& e) { return std::chrono::milliseconds(e.timeout_ms); }

std::string id_or(const AdapterEndpoint& e, std::string fallback) { return e.id.empty() ? fallback : e.id; }

tools::ScorerPtr remote_scorer(const AdapterEndpoint& e, const EngineConfig& config, const std::string& name) {
  if (e.transport == "http") return std::make_shared<tools::HttpScorer>(id_or(e, name), e.url, timeout_of(e), true);
  return std::make_shared<tools::SubprocessScorer>(id_or(e, name), e.command, config.scratch_dir, timeout_of(e));
}

tools::ChatClientPtr http_chat(const AdapterEndpoint& e) {
  tools::HttpChatConfig base;
  const auto scheme = e.url.find("://");
  const auto slash = e.url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  base.base_url = slash == std::string::npos ? e.url : e.url.substr(0, slash);
  if (slash != std::string::npos) base.path = e.url.substr(slash);
  base.model = e.model;
  base.timeout = timeout_of(e);
  return std::make_shared<tools::HttpChatClient>(tools::HttpChatConfig::from_environment(base));
}

/// Mean of the unmasked pixels written into the masked ones.
Image mean_fill(const Image& image, const Mask& mask) {
  double sum = 0;
  long n = 0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (!mask.values()[i]) {
      sum += image.values()[i];
      ++n;
    }
  }
  Image out = image;
  const double fill = n > 0 ? sum / static_cast<double>(n) : 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask.values()[i]) out.values()[i] = fill;
  }
  return out;
}

std::uint64_t case_seed(std::uint64_t seed, const std::string& case_id) {
  std::uint64_t h = 0;
  const auto n = std::min<std::size_t>(16, case_id.size());
  std::from_chars(case_id.data(), case_id.data() + n, h, 16);
  return seed ^ h;
}

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

triage::Latency latency_since(Clock::time_point start, double adapter_before) {
  triage::Latency l;
  l.total_ms = elapsed_ms(start);
  l.adapter_ms = std::max(0.0, tools::adapter_ms() - adapter_before);
  l.orchestration_ms = std::max(0.0, l.total_ms - l.adapter_ms);
  return l;
}

}  // namespace

void tune_allocator() noexcept {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 512 * 1024 * 1024);
  mallopt(M_TRIM_THRESHOLD, 1024 * 1024 * 1024);
#endif
}

EngineAdapters build_adapters(const EngineConfig& config) {
  EngineAdapters a;
  StubBehaviorPtr behavior;
  if (!config.stub_behavior.empty()) behavior = std::make_shared<const StubBehavior>(StubBehavior::load(config.stub_behavior));

  const auto& s = config.scorer;
  if (s.transport == "none") throw UsageError("a base scorer is required");
  tools::ScorerPtr scorer;
  if (s.transport == "stub") {
    scorer = behavior ? make_scripted_scorer(behavior) : std::make_shared<tools::IntensityStubScorer>();
  } else {
    scorer = remote_scorer(s, config, "scorer");
  }
  a.scorer = std::make_shared<tools::TimedScorer>(scorer);

  const int n_stub = static_cast<int>(config.experts.size());
  const auto scripted = behavior ? make_scripted_experts(behavior, n_stub) : make_intensity_experts(n_stub);
  for (std::size_t i = 0; i < config.experts.size(); ++i) {
    const auto& e = config.experts[i];
    if (e.transport == "none") continue;
    tools::ScorerPtr expert = e.transport == "stub" ? scripted[i] : remote_scorer(e, config, "expert-" + std::to_string(i));
    a.experts.push_back(std::make_shared<tools::TimedScorer>(expert));
  }

  if (config.vlm.transport == "stub") {
    a.vlm = behavior ? make_scripted_vlm(behavior) : make_intensity_vlm();
  } else if (config.vlm.transport == "http") {
    a.vlm = http_chat(config.vlm);
  } else if (config.vlm.transport == "subprocess") {
    throw UsageError("adapters.vlm: subprocess transport is not supported for chat models");
  }
  if (a.vlm) a.vlm = std::make_shared<tools::TimedChatClient>(a.vlm);

  if (config.router == "llm") {
    if (config.llm.transport == "stub") {
      a.llm = make_rule_mimic_llm();
    } else if (config.llm.transport == "http") {
      a.llm = http_chat(config.llm);
    } else {
      throw UsageError("router 'llm' needs an adapters.llm endpoint (stub or http)");
    }
    a.llm = std::make_shared<tools::TimedChatClient>(a.llm);
  }

  const auto& g = config.segmenter;
  quantify::SegmenterPtr seg;
  if (g.transport == "stub") {
    seg = std::make_shared<quantify::SyntheticSegmenter>();
  } else if (g.transport == "http") {
    seg = std::make_shared<quantify::HttpSegmenter>(id_or(g, "segmenter"), g.url, timeout_of(g));
  } else if (g.transport == "subprocess") {
    throw UsageError("adapters.segmenter: subprocess transport is not supported");
  }
  if (seg) {
    seg = std::make_shared<TimedSegmenter>(seg);
    a.quantify.segmentation = {seg, seg, seg};
  }

  const auto& p = config.inpainter;
  quantify::InpainterPtr inpaint;
  if (p.transport == "stub") {
    inpaint = std::make_shared<quantify::FunctionInpainter>("mean-fill", mean_fill);
  } else if (p.transport == "http") {
    inpaint = std::make_shared<quantify::HttpInpainter>(id_or(p, "inpainter"), p.url, timeout_of(p));
  } else if (p.transport == "subprocess") {
    throw UsageError("adapters.inpainter: subprocess transport is not supported");
  }
  if (inpaint) a.quantify.inpainter = std::make_shared<TimedInpainter>(inpaint);
  return a;
}

Engine::Engine(EngineConfig config, ood::ModelBundle model, EngineAdapters adapters,
               std::optional<features::FeatureTable> feature_table)
    : config_(std::move(config)),
      config_hash_(config_.hash()),
      model_(std::move(model)),
      model_version_("sha256:" + sha256_hex(ood::serialize_model(model_)).substr(0, 16)),
      adapters_(std::move(adapters)),
      tree_(config_.output_dir) {
  if (config_.output_dir.empty()) throw UsageError("an output directory is required");
  if (!model_.reference.tau_ood()) throw DataError("model file has no calibrated OOD threshold");
  if (feature_table) {
    for (std::size_t i = 0; i < feature_table->case_ids.size(); ++i) {
      table_rows_.emplace(feature_table->case_ids[i], feature_table->rows[i]);
    }
  }
  if (model_.feature_source != "builtin" && table_rows_.empty()) {
    throw UsageError("model was fit on external features; paths.feature_table is required");
  }
  tree_.ensure();
}

Engine Engine::from_config(const EngineConfig& config) {
  if (config.model_file.empty()) throw UsageError("paths.model is required");
  if (!fs::exists(config.model_file)) throw UsageError("model file not found: " + config.model_file);
  auto model = ood::load_model(config.model_file);
  std::optional<features::FeatureTable> table;
  if (!config.feature_table.empty()) table = features::read_feature_table_file(config.feature_table);
  return Engine(config, std::move(model), build_adapters(config), std::move(table));
}

features::RawFeatureVector Engine::features_for(const ingestion::CaseRecord& record) const {
  if (model_.feature_source == "builtin") return features::extract_features(record.pixels);
  const auto it = table_rows_.find(record.case_id);
  if (it == table_rows_.end()) throw DataError("no feature row for case " + record.case_id);
  return it->second;
}

triage::TraceVersions Engine::versions() const {
  triage::TraceVersions v;
  v.engine = std::string(engine_version());
  if (adapters_.scorer) v.base_scorer = adapters_.scorer->id() + "@" + adapters_.scorer->version();
  for (const auto& e : adapters_.experts) v.experts.push_back(e->id() + "@" + e->version());
  if (adapters_.vlm) v.vlm = adapters_.vlm->model_id();
  v.router_prompt = assets::version_of(assets::router_prompt());
  v.vlm_prompt = assets::version_of(assets::vlm_prompt());
  v.model_file = model_version_;
  return v;
}

CaseReport Engine::process_path(const fs::path& path, ingestion::CaseIdAllocator& ids) const {
  ingestion::RawCase raw;
  try {
    raw = ingestion::load_raw_case(path);
  } catch (const ingestion::QuarantineError& e) {
    return quarantine(path, e.reason(), ids);
  }
  return process_raw(raw, ids);
}

CaseReport Engine::quarantine(const fs::path& path, const std::string& reason, ingestion::CaseIdAllocator& ids) const {
  const auto start = Clock::now();
  const double before = tools::adapter_ms();
  const std::string received = iso_timestamp_now();
  std::string case_id;
  try {
    case_id = ids.assign(read_file_bytes(path.string()));
  } catch (const Error&) {
    const std::string p = path.string();
    case_id = ids.assign(std::span(reinterpret_cast<const std::uint8_t*>(p.data()), p.size()));
  }
  return quarantine_impl(path, reason, case_id, received, before, start);
}

CaseReport Engine::quarantine_impl(const fs::path& path, const std::string& reason, const std::string& case_id,
                                   const std::string& received, double adapter_before, Clock::time_point start) const {
  triage::TraceRecord t;
  t.status = "quarantined";
  t.case_id = case_id;
  t.source_file = path.filename().string();
  t.received = received;
  t.versions = versions();
  t.config_hash = config_hash_;
  t.quarantine_reason = reason;
  if (fs::exists(path)) {
    t.artifacts.destination = triage::move_into(path, tree_.folder(triage::Destination::quarantine), case_id).string();
  } else {
    t.notes.push_back("source_missing");
  }
  t.decided = iso_timestamp_now();
  t.latency = latency_since(start, adapter_before);
  CaseReport r;
  r.case_id = case_id;
  r.status = t.status;
  r.destination = triage::Destination::quarantine;
  r.latency = t.latency;
  r.trace_path = triage::write_trace(triage::trace_to_json(t), tree_.root());
  return r;
}

CaseReport Engine::process_raw(const ingestion::RawCase& raw, ingestion::CaseIdAllocator& ids) const {
  const auto start = Clock::now();
  const double adapter_before = tools::adapter_ms();
  const std::string received = iso_timestamp_now();
  const std::string case_id = ids.assign(raw.bytes);

  // Stage I
  ingestion::CaseRecord record;
  try {
    record = ingestion::normalize_case(raw, case_id);
  } catch (const ingestion::QuarantineError& e) {
    return quarantine_impl(raw.source_path, e.reason(), case_id, received, adapter_before, start);
  }

  triage::TraceRecord t;
  t.case_id = case_id;
  t.source_file = raw.source_path.filename().string();
  t.received = received;
  t.versions = versions();
  t.config_hash = config_hash_;
  t.router = config_.router;
  t.preprocessing = triage::Preprocessing{record.meta("format"), std::stoi(record.meta("original_rows")),
                                          std::stoi(record.meta("original_cols")), record.pixels.rows()};

  CaseReport report;
  report.case_id = case_id;

  // Stage II
  std::optional<policy::CaseSession> session;
  try {
    const auto ood_signal = model_.score(features_for(record));
    const auto base = tools::base_score(record, *adapters_.scorer, config_.retries);
    policy::Thresholds th = config_.thresholds;
    th.tau_ood = *model_.reference.tau_ood();
    session.emplace(policy::CaseSignals{base, ood_signal.score, th.tau_ood, model_.reference.ridge_lambda()}, th);
  } catch (const Error& e) {
    t.status = "error";
    t.notes.push_back(std::string("stage2_failure: ") + e.what());
    t.artifacts.destination =
        triage::move_into(raw.source_path, tree_.folder(triage::Destination::human_review), case_id).string();
    t.decided = iso_timestamp_now();
    t.latency = latency_since(start, adapter_before);
    report.status = t.status;
    report.destination = triage::Destination::human_review;
    report.latency = t.latency;
    report.trace_path = triage::write_trace(triage::trace_to_json(t), tree_.root());
    return report;
  }

  // Stage III
  const auto policy = policy::RouterPolicy::from_thresholds(session->thresholds(), config_.policy_mode,
                                                            config_.max_auto_accept_frd_multiple);
  tools::TtaOptions tta{config_.tta_k, case_seed(config_.tta_seed, case_id), config_.retries};
  policy::AdapterToolbox toolbox(record, adapters_.scorer, adapters_.experts, adapters_.vlm, tta, config_.retries);
  if (config_.router == "llm") {
    policy::LlmRouter router(*adapters_.llm);
    policy::route_case(*session, router, toolbox, policy, config_.max_steps);
  } else {
    policy::RuleRouter router;
    policy::route_case(*session, router, toolbox, policy, config_.max_steps);
  }
  const triage::TriageOutcome outcome = *session->outcome();

  // Post-accept quantification for accepted positives.
  std::optional<quantify::QuantifyResult> quant;
  if (outcome.accepted_positive()) {
    const std::string trigger = session->post_accept_requested() ? "post_accept" : "implicit";
    policy::ToolEvent ev;
    ev.tool = "post_accept";
    ev.started_at = iso_timestamp_now();
    ev.inputs = {{"trigger", trigger}};
    const auto q0 = Clock::now();
    quant = quantify::quantify_case(record, adapters_.quantify, adapters_.scorer.get());
    ev.duration_ms = elapsed_ms(q0);
    ev.ok = quant->lwi.has_value();
    ev.outputs = {{"lwi", quant->lwi ? ordered_json(quant->lwi->lwi) : ordered_json(nullptr)},
                  {"cam_available", quant->cam.has_value()},
                  {"notes", quant->notes}};
    if (!ev.ok) ev.error = "lwi_unavailable";
    session->add_event(std::move(ev));
    t.quantification = triage::QuantificationSummary{trigger, quant->lwi, quant->cam.has_value()};
    t.notes.insert(t.notes.end(), quant->notes.begin(), quant->notes.end());
  }

  // Stage IV
  const auto disposal = triage::dispose(raw.source_path, case_id, outcome, tree_);
  const auto artifacts = triage::persist_artifacts(case_id, outcome, quant ? &*quant : nullptr, tree_);
  t.artifacts = artifacts;
  t.artifacts.destination = disposal.destination.string();
  if (disposal.sidecar) t.artifacts.sidecar = disposal.sidecar->string();
  t.session = &*session;
  t.decided = iso_timestamp_now();
  t.latency = latency_since(start, adapter_before);

  report.status = t.status;
  report.outcome = outcome;
  report.destination = triage::destination_for(outcome);
  report.latency = t.latency;
  report.trace_path = triage::write_trace(triage::trace_to_json(t), tree_.root());
  return report;
}

}  // namespace cxrt::app
