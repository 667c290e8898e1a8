// SPDX-License-Identifier: Apache-2.0
#include "cxrt/app/stub_behavior.hpp"

#include <algorithm>

#include <cmath>
#include <cstdio>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"
#include "cxrt/policy/router.hpp"
#include "cxrt/tools/vlm.hpp"

namespace cxrt::app {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json StubCase::to_json() const {
  ordered_json j;
  j["file"] = file;
  j["label"] = to_string(truth);
  j["predicted"] = to_string(predicted);
  j["p"] = p;
  j["tta"] = tta ? ordered_json(*tta) : ordered_json("fail");
  j["moe"] = moe;
  j["vlm"] = vlm;
  j["band"] = band;
  j["ood"] = ood;
  j["planted_correct"] = planted_correct;
  return j;
}

StubCase StubCase::from_json(const json& j) {
  try {
    StubCase c;
    c.file = j.at("file").get<std::string>();
    const auto truth = parse_label(j.at("label").get<std::string>());
    const auto predicted = parse_label(j.at("predicted").get<std::string>());
    if (!truth || !predicted) throw DataError("stub behavior: bad label");
    c.truth = *truth;
    c.predicted = *predicted;
    c.p = j.at("p").get<double>();
    if (j.at("tta").is_array()) c.tta = j.at("tta").get<std::vector<double>>();
    c.moe = j.at("moe").get<std::vector<double>>();
    c.vlm = j.at("vlm").get<std::string>();
    c.band = j.value("band", "");
    c.ood = j.value("ood", false);
    c.planted_correct = j.value("planted_correct", false);
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("stub behavior: ") + e.what());
  }
}

StubBehavior StubBehavior::load(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError("stub behavior " + path + ": " + e.what());
  }
  if (!j.is_object()) throw DataError("stub behavior " + path + ": expected an object keyed by case_id");
  std::map<std::string, StubCase> cases;
  for (const auto& [id, entry] : j.items()) cases.emplace(id, StubCase::from_json(entry));
  return StubBehavior(std::move(cases));
}

void StubBehavior::save(const std::string& path) const { write_file_atomic(path, to_json().dump(2) + "\n"); }

const StubCase& StubBehavior::at(const std::string& case_id) const {
  const auto it = cases_.find(case_id);
  if (it == cases_.end()) throw AdapterError("no scripted behavior for case " + case_id);
  return it->second;
}

ordered_json StubBehavior::to_json() const {
  ordered_json j = ordered_json::object();
  for (const auto& [id, c] : cases_) j[id] = c.to_json();
  return j;
}

tools::ScorerPtr make_scripted_scorer(StubBehaviorPtr behavior) {
  auto cam_source = std::make_shared<tools::IntensityStubScorer>();
  return std::make_shared<tools::FunctionScorer>(
      "scripted-scorer", "1",
      [behavior](const tools::ScoringRequest& request) {
        const StubCase& c = behavior->at(request.record.case_id);
        if (request.sample_index < 0) return c.p;
        if (!c.tta) throw AdapterError("scripted tta failure");
        if (static_cast<std::size_t>(request.sample_index) >= c.tta->size()) {
          throw AdapterError("scripted tta has no sample " + std::to_string(request.sample_index));
        }
        return (*c.tta)[static_cast<std::size_t>(request.sample_index)];
      },
      [cam_source](const tools::CaseRecord& record) { return cam_source->cam(record); });
}

std::vector<tools::ScorerPtr> make_scripted_experts(StubBehaviorPtr behavior, int count) {
  std::vector<tools::ScorerPtr> experts;
  for (int i = 0; i < count; ++i) {
    experts.push_back(std::make_shared<tools::FunctionScorer>(
        "scripted-expert-" + std::to_string(i), "1", [behavior, i](const tools::ScoringRequest& request) {
          const StubCase& c = behavior->at(request.record.case_id);
          if (static_cast<std::size_t>(i) >= c.moe.size()) throw AdapterError("scripted expert missing");
          return c.moe[static_cast<std::size_t>(i)];
        }));
  }
  return experts;
}

tools::ChatClientPtr make_scripted_vlm(StubBehaviorPtr behavior) {
  return std::make_shared<tools::ScriptedChatClient>(
      "scripted-vlm", [behavior](const tools::ChatRequest& request) { return behavior->at(request.case_id).vlm; });
}

std::vector<tools::ScorerPtr> make_intensity_experts(int count) {
  std::vector<tools::ScorerPtr> experts;
  for (int i = 0; i < count; ++i) {
    const double midpoint = 0.47 + 0.02 * i;
    experts.push_back(std::make_shared<tools::IntensityStubScorer>("intensity-expert-" + std::to_string(i), 10.0, midpoint));
  }
  return experts;
}

tools::ChatClientPtr make_intensity_vlm() {
  auto scorer = std::make_shared<tools::IntensityStubScorer>("intensity-vlm");
  return std::make_shared<tools::ScriptedChatClient>("intensity-vlm", [scorer](const tools::ChatRequest& request) {
    if (!request.image) throw AdapterError("intensity vlm needs an image");
    tools::CaseRecord record;
    record.case_id = request.case_id;
    record.pixels = *request.image;
    const double p = scorer->score(tools::ScoringRequest{record, std::nullopt, -1});
    char conf[16];
    std::snprintf(conf, sizeof conf, "%.2f", p);
    const double rounded = std::strtod(conf, nullptr);
    const Label label = rounded >= 0.5 ? Label::positive : Label::negative;
    return tools::format_vlm_block(label, conf, label == Label::positive ? "central opacity" : "clear central field");
  });
}

tools::ChatClientPtr make_rule_mimic_llm() {
  return std::make_shared<tools::ScriptedChatClient>("rule-mimic-llm", [](const tools::ChatRequest& request) {
    const json state = policy::extract_router_state(request.user);
    const auto avail = state.at("available_tools");
    const auto has = [&](const char* name) {
      for (const auto& a : avail) {
        if (a == name) return true;
      }
      return false;
    };
    json reply = {{"reason", "rule mimic"}, {"stop", false}, {"final_label", nullptr}, {"decided_by", "llm_router"}};
    if (state.at("accepted").get<bool>()) {
      reply["next_tool"] = "POST_ACCEPT";
      reply["stop"] = true;
      reply["final_label"] = state.at("final_label");
    } else if (has("accept")) {
      reply["next_tool"] = "accept";
      // After a MoE pass the label is the committee majority, which STATE does not carry.
      const double p = state.at("p").get<double>();
      const auto& pol = state.at("policy");
      const auto& tta_std = state.at("tta_std");
      const bool tta_pass = tta_std.is_number() && tta_std.get<double>() <= pol.at("std_ok").get<double>() &&
                            std::max(p, 1.0 - p) >= pol.at("p_accept").get<double>();
      if (!state.at("already_ran").at("moe").get<bool>() || tta_pass) reply["final_label"] = p >= 0.5 ? "PE_yes" : "PE_no";
    } else if (has("tta")) {
      reply["next_tool"] = "tta";
    } else if (has("moe")) {
      reply["next_tool"] = "moe";
    } else {
      reply["next_tool"] = "vlm";
      reply["stop"] = true;
    }
    return reply.dump();
  });
}

}  // namespace cxrt::app
