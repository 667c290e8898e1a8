// SPDX-License-Identifier: Apache-2.0
#include "cxrt/app/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"

extern char** environ;

namespace cxrt::app {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json endpoint_json(const AdapterEndpoint& e) {
  return {{"transport", e.transport}, {"id", e.id},           {"url", e.url},
          {"command", e.command},     {"model", e.model},     {"timeout_ms", e.timeout_ms}};
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw UsageError("config: " + where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw UsageError("config: unknown key '" + where + (where.empty() ? "" : ".") + k + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw UsageError("config: '" + where + key + "' has the wrong type");
  }
}

AdapterEndpoint endpoint_from(const json& j, const std::string& where, AdapterEndpoint e) {
  reject_unknown(j, {"transport", "id", "url", "command", "model", "timeout_ms"}, where);
  read(j, "transport", e.transport, where + ".");
  read(j, "id", e.id, where + ".");
  read(j, "url", e.url, where + ".");
  read(j, "command", e.command, where + ".");
  read(j, "model", e.model, where + ".");
  read(j, "timeout_ms", e.timeout_ms, where + ".");
  return e;
}

void validate_endpoint(const AdapterEndpoint& e, const std::string& where) {
  if (e.transport == "stub" || e.transport == "none") return;
  if (e.transport == "http") {
    if (e.url.empty()) throw UsageError("config: " + where + " uses http but has no url");
  } else if (e.transport == "subprocess") {
    if (e.command.empty()) throw UsageError("config: " + where + " uses subprocess but has no command");
  } else {
    throw UsageError("config: " + where + " has unknown transport '" + e.transport + "'");
  }
  if (e.timeout_ms <= 0) throw UsageError("config: " + where + ".timeout_ms must be positive");
}

}  // namespace

ordered_json EngineConfig::to_json() const {
  ordered_json experts_json = ordered_json::array();
  for (const auto& e : experts) experts_json.push_back(endpoint_json(e));
  return {{"thresholds", {{"tau_conf", thresholds.tau_conf}, {"tau_tta", thresholds.tau_tta}, {"tau_moe", thresholds.tau_moe}}},
          {"router", router},
          {"policy_mode", policy::to_string(policy_mode)},
          {"max_auto_accept_frd_multiple", max_auto_accept_frd_multiple},
          {"max_steps", max_steps},
          {"workers", workers},
          {"tta", {{"k", tta_k}, {"seed", tta_seed}}},
          {"retries", retries},
          {"paths",
           {{"input", input_dir},
            {"output", output_dir},
            {"model", model_file},
            {"stub_behavior", stub_behavior},
            {"feature_table", feature_table},
            {"scratch", scratch_dir}}},
          {"adapters",
           {{"scorer", endpoint_json(scorer)},
            {"experts", std::move(experts_json)},
            {"vlm", endpoint_json(vlm)},
            {"llm", endpoint_json(llm)},
            {"segmenter", endpoint_json(segmenter)},
            {"inpainter", endpoint_json(inpainter)}}},
          {"watch", {{"poll_ms", poll_ms}, {"stability_ms", stability_ms}}}};
}

EngineConfig EngineConfig::from_json(const json& j) {
  EngineConfig c;
  reject_unknown(j,
                 {"thresholds", "router", "policy_mode", "max_auto_accept_frd_multiple", "max_steps", "workers", "tta",
                  "retries", "paths", "adapters", "watch"},
                 "");
  if (const auto t = j.find("thresholds"); t != j.end()) {
    reject_unknown(*t, {"tau_conf", "tau_tta", "tau_moe"}, "thresholds");
    read(*t, "tau_conf", c.thresholds.tau_conf, "thresholds.");
    read(*t, "tau_tta", c.thresholds.tau_tta, "thresholds.");
    read(*t, "tau_moe", c.thresholds.tau_moe, "thresholds.");
  }
  read(j, "router", c.router, "");
  std::string mode = "default";
  read(j, "policy_mode", mode, "");
  const auto parsed_mode = policy::parse_policy_mode(mode);
  if (!parsed_mode) throw UsageError("config: unknown policy_mode '" + mode + "'");
  c.policy_mode = *parsed_mode;
  read(j, "max_auto_accept_frd_multiple", c.max_auto_accept_frd_multiple, "");
  read(j, "max_steps", c.max_steps, "");
  read(j, "workers", c.workers, "");
  read(j, "retries", c.retries, "");
  if (const auto t = j.find("tta"); t != j.end()) {
    reject_unknown(*t, {"k", "seed"}, "tta");
    read(*t, "k", c.tta_k, "tta.");
    read(*t, "seed", c.tta_seed, "tta.");
  }
  if (const auto p = j.find("paths"); p != j.end()) {
    reject_unknown(*p, {"input", "output", "model", "stub_behavior", "feature_table", "scratch"}, "paths");
    read(*p, "input", c.input_dir, "paths.");
    read(*p, "output", c.output_dir, "paths.");
    read(*p, "model", c.model_file, "paths.");
    read(*p, "stub_behavior", c.stub_behavior, "paths.");
    read(*p, "feature_table", c.feature_table, "paths.");
    read(*p, "scratch", c.scratch_dir, "paths.");
  }
  if (const auto a = j.find("adapters"); a != j.end()) {
    reject_unknown(*a, {"scorer", "experts", "vlm", "llm", "segmenter", "inpainter"}, "adapters");
    if (a->contains("scorer")) c.scorer = endpoint_from((*a)["scorer"], "adapters.scorer", c.scorer);
    if (a->contains("experts")) {
      const auto& list = (*a)["experts"];
      if (!list.is_array()) throw UsageError("config: adapters.experts must be a list");
      c.experts.clear();
      for (std::size_t i = 0; i < list.size(); ++i) {
        c.experts.push_back(endpoint_from(list[i], "adapters.experts[" + std::to_string(i) + "]", {}));
      }
    }
    if (a->contains("vlm")) c.vlm = endpoint_from((*a)["vlm"], "adapters.vlm", c.vlm);
    if (a->contains("llm")) c.llm = endpoint_from((*a)["llm"], "adapters.llm", c.llm);
    if (a->contains("segmenter")) c.segmenter = endpoint_from((*a)["segmenter"], "adapters.segmenter", c.segmenter);
    if (a->contains("inpainter")) c.inpainter = endpoint_from((*a)["inpainter"], "adapters.inpainter", c.inpainter);
  }
  if (const auto w = j.find("watch"); w != j.end()) {
    reject_unknown(*w, {"poll_ms", "stability_ms"}, "watch");
    read(*w, "poll_ms", c.poll_ms, "watch.");
    read(*w, "stability_ms", c.stability_ms, "watch.");
  }
  return c;
}

void EngineConfig::validate() const {
  thresholds.validate();
  if (router != "rule" && router != "llm") throw UsageError("config: router must be 'rule' or 'llm'");
  if (!std::isfinite(max_auto_accept_frd_multiple) || max_auto_accept_frd_multiple <= 0) {
    throw UsageError("config: max_auto_accept_frd_multiple must be positive");
  }
  if (max_steps < 1) throw UsageError("config: max_steps must be >= 1");
  if (workers < 1) throw UsageError("config: workers must be >= 1");
  if (tta_k < 2) throw UsageError("config: tta.k must be >= 2");
  if (retries < 0) throw UsageError("config: retries must be >= 0");
  if (poll_ms <= 0 || stability_ms < 0) throw UsageError("config: watch intervals must be positive");
  validate_endpoint(scorer, "adapters.scorer");
  for (std::size_t i = 0; i < experts.size(); ++i) validate_endpoint(experts[i], "adapters.experts[" + std::to_string(i) + "]");
  validate_endpoint(vlm, "adapters.vlm");
  validate_endpoint(llm, "adapters.llm");
  validate_endpoint(segmenter, "adapters.segmenter");
  validate_endpoint(inpainter, "adapters.inpainter");
}

std::string EngineConfig::hash() const { return sha256_hex(to_json().dump()); }

const std::vector<std::pair<std::string, std::string>>& config_environment_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"CXRT_TAU_CONF", "/thresholds/tau_conf"},
      {"CXRT_TAU_TTA", "/thresholds/tau_tta"},
      {"CXRT_TAU_MOE", "/thresholds/tau_moe"},
      {"CXRT_ROUTER", "/router"},
      {"CXRT_POLICY_MODE", "/policy_mode"},
      {"CXRT_MAX_STEPS", "/max_steps"},
      {"CXRT_WORKERS", "/workers"},
      {"CXRT_TTA_K", "/tta/k"},
      {"CXRT_TTA_SEED", "/tta/seed"},
      {"CXRT_RETRIES", "/retries"},
      {"CXRT_INPUT_DIR", "/paths/input"},
      {"CXRT_OUTPUT_DIR", "/paths/output"},
      {"CXRT_MODEL_FILE", "/paths/model"},
      {"CXRT_STUB_BEHAVIOR", "/paths/stub_behavior"},
      {"CXRT_SCORER_URL", "/adapters/scorer/url"},
      {"CXRT_VLM_URL", "/adapters/vlm/url"},
      {"CXRT_LLM_URL", "/adapters/llm/url"},
  };
  return keys;
}

namespace {

json env_value(const std::string& pointer, const std::string& text) {
  static const std::vector<std::string> string_keys = {"/router", "/policy_mode"};
  const bool stringy = pointer.rfind("/paths/", 0) == 0 || pointer.rfind("/adapters/", 0) == 0 ||
                       pointer == "/router" || pointer == "/policy_mode";
  if (stringy) return text;
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    throw UsageError("environment value for " + pointer + " is not a number: '" + text + "'");
  }
}

}  // namespace

EngineConfig load_config(const std::optional<std::string>& file, const std::map<std::string, std::string>& env,
                         const json& overrides) {
  json layered = json::parse(EngineConfig{}.to_json().dump());
  if (file) {
    json from_file;
    try {
      from_file = json::parse(read_text_file(*file));
    } catch (const json::exception& e) {
      throw UsageError("config file " + *file + " is not valid JSON: " + e.what());
    } catch (const DataError& e) {
      throw UsageError(std::string("config file: ") + e.what());
    }
    // Experts replace the whole list rather than merging element-wise.
    layered.merge_patch(from_file);
  }
  json from_env = json::object();
  for (const auto& [var, pointer] : config_environment_keys()) {
    const auto it = env.find(var);
    if (it != env.end()) from_env[json::json_pointer(pointer)] = env_value(pointer, it->second);
  }
  layered.merge_patch(from_env);
  if (!overrides.is_null()) layered.merge_patch(overrides);
  EngineConfig c = EngineConfig::from_json(layered);
  c.validate();
  return c;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    if (entry.rfind("CXRT_", 0) != 0) continue;
    const auto eq = entry.find('=');
    if (eq != std::string::npos) env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return env;
}

}  // namespace cxrt::app
