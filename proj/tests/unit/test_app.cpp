// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "cxrt/app/batch.hpp"
#include "cxrt/app/calibrate.hpp"
#include "cxrt/app/cohort.hpp"
#include "cxrt/app/config.hpp"
#include "cxrt/app/engine.hpp"
#include "cxrt/app/evaluate.hpp"
#include "cxrt/error.hpp"
#include "cxrt/policy/safety.hpp"
#include "cxrt/triage/schema.hpp"
#include "cxrt/triage/trace.hpp"
#include "test_support.hpp"

using namespace cxrt;
using namespace cxrt::app;
using cxrt::testing::TempDir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

SyntheticCohortSpec small_spec(int n, std::uint64_t seed) {
  SyntheticCohortSpec spec;
  spec.n_cases = n;
  spec.reference_cases = 40;
  spec.image_size = 96;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST(Config, LayeringPrecedence) {
  TempDir tmp;
  const auto file = (tmp.path() / "cfg.json").string();
  std::ofstream(file) << R"({"thresholds": {"tau_conf": 0.7, "tau_moe": 0.8}, "router": "llm", "workers": 3})";
  const auto from_file = load_config(file, {}, nullptr);
  EXPECT_EQ(from_file.thresholds.tau_conf, 0.7);
  EXPECT_EQ(from_file.thresholds.tau_moe, 0.8);
  EXPECT_EQ(from_file.router, "llm");
  EXPECT_EQ(from_file.workers, 3);
  EXPECT_EQ(from_file.thresholds.tau_tta, policy::kDefaultTauTta);

  const std::map<std::string, std::string> env = {{"CXRT_TAU_CONF", "0.8"}, {"CXRT_ROUTER", "rule"}};
  const auto with_env = load_config(file, env, nullptr);
  EXPECT_EQ(with_env.thresholds.tau_conf, 0.8);
  EXPECT_EQ(with_env.router, "rule");
  EXPECT_EQ(with_env.thresholds.tau_moe, 0.8);

  const auto with_flags = load_config(file, env, json{{"thresholds", {{"tau_conf", 0.9}}}});
  EXPECT_EQ(with_flags.thresholds.tau_conf, 0.9);
  EXPECT_EQ(with_flags.workers, 3);

  EXPECT_NE(with_env.hash(), with_flags.hash());
  EXPECT_EQ(with_flags.hash(), load_config(file, env, json{{"thresholds", {{"tau_conf", 0.9}}}}).hash());
  EXPECT_EQ(EngineConfig::from_json(json::parse(with_flags.to_json().dump())).hash(), with_flags.hash());
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  TempDir tmp;
  const auto file = (tmp.path() / "cfg.json").string();
  std::ofstream(file) << R"({"thresholdz": {}})";
  EXPECT_THROW(load_config(file, {}, nullptr), UsageError);
  EXPECT_THROW(load_config(std::nullopt, {}, json{{"thresholds", {{"tau_confidence", 0.7}}}}), UsageError);
  EXPECT_THROW(load_config(std::nullopt, {{"CXRT_TAU_CONF", "high"}}, nullptr), UsageError);
  EXPECT_THROW(load_config(std::nullopt, {}, json{{"thresholds", {{"tau_conf", 1.5}}}}), UsageError);
  EXPECT_THROW(load_config(std::nullopt, {}, json{{"router", "astrology"}}), UsageError);
  const auto missing = (tmp.path() / "nope.json").string();
  EXPECT_THROW(load_config(missing, {}, nullptr), UsageError);
}

TEST(Cohort, SameSeedSameBytes) {
  TempDir a, b, c;
  const auto sa = generate_cohort(small_spec(12, 5), a.path());
  const auto sb = generate_cohort(small_spec(12, 5), b.path());
  generate_cohort(small_spec(12, 6), c.path());
  EXPECT_EQ(sa.to_json(), sb.to_json());
  EXPECT_EQ(tree_contents(a.path()), tree_contents(b.path()));
  EXPECT_NE(tree_contents(a.path()), tree_contents(c.path()));
  EXPECT_EQ(sa.n_cases, 12);
  EXPECT_EQ(read_labels(a.path() / "labels.csv").size(), 12u);
}

TEST(Cohort, SpecValidation) {
  SyntheticCohortSpec spec;
  EXPECT_NO_THROW(spec.validate());
  spec.bands = {{0.5, 0.7, 0.7}, {0.8, 1.0, 0.9}};
  EXPECT_THROW(spec.validate(), UsageError);
  spec = SyntheticCohortSpec{};
  spec.ood_fraction = 1.5;
  EXPECT_THROW(spec.validate(), UsageError);
  spec = SyntheticCohortSpec{};
  EXPECT_EQ(SyntheticCohortSpec::from_json(json::parse(spec.to_json().dump())).to_json(), spec.to_json());
}

TEST(Evaluate, ArithmeticOnHandWrittenTraces) {
  TempDir tmp;
  const fs::path traces = tmp.path() / "traces";
  fs::create_directories(traces);
  auto write = [&](const std::string& id, const std::string& decision, const std::string& label, double conf) {
    json t = {{"status", "decided"},
              {"case_id", id},
              {"decision",
               {{"decision", decision},
                {"final_label", label},
                {"suggested_label", decision == "abstain" ? json(label) : json(nullptr)},
                {"rationale", "r"},
                {"decided_by", "rule_router"},
                {"final_confidence", conf}}}};
    std::ofstream(traces / (id + ".json")) << t.dump();
  };
  write("a", "accept", "positive", 0.9);
  write("b", "accept", "negative", 0.8);
  write("c", "abstain", "positive", 0.6);
  write("d", "accept", "positive", 0.7);
  write("e", "accept", "positive", 0.95);  // no label
  std::ofstream(traces / "q.json") << json{{"status", "quarantined"}, {"case_id", "q"}, {"decision", nullptr}}.dump();
  const std::map<std::string, Label> labels = {
      {"a", Label::positive}, {"b", Label::negative}, {"c", Label::negative}, {"d", Label::positive}, {"q", Label::positive}};
  const auto r = evaluate_traces(traces, labels);
  EXPECT_EQ(r.traces, 6);
  EXPECT_EQ(r.predictions.size(), 4u);
  EXPECT_EQ(r.missing_labels, (std::vector<std::string>{"e"}));
  EXPECT_EQ(r.undecided, (std::vector<std::string>{"q"}));
  EXPECT_EQ(r.classification.accuracy, 0.75);
  EXPECT_EQ(r.classification.fp, 1);
  // Ranked by confidence: a(ok) b(ok) d(ok) c(wrong).
  EXPECT_EQ(r.selective.aurc, 0.0625);
  EXPECT_EQ(r.automation.automated, 3);
  EXPECT_EQ(r.automation.risk, 0.0);
}

TEST(EndToEnd, SmallCohortRoutesEveryCaseOnce) {
  TempDir tmp;
  const auto summary = generate_cohort(small_spec(24, 11), tmp.path() / "cohort");
  calibrate_from_directory(tmp.path() / "cohort" / "reference", tmp.path() / "model.json");
  fs::copy(tmp.path() / "cohort" / "cases", tmp.path() / "input");
  std::set<std::string> inputs;
  for (const auto& e : fs::directory_iterator(tmp.path() / "input")) inputs.insert(e.path().filename().string());

  EngineConfig cfg;
  cfg.input_dir = (tmp.path() / "input").string();
  cfg.output_dir = (tmp.path() / "out").string();
  cfg.model_file = (tmp.path() / "model.json").string();
  cfg.stub_behavior = (tmp.path() / "cohort" / "stub_behavior.json").string();
  cfg.scratch_dir = (tmp.path() / "scratch").string();
  cfg.validate();
  const Engine engine = Engine::from_config(cfg);
  const RunSummary run = run_batch(engine, cfg.input_dir);
  EXPECT_EQ(run.cases, 24);
  EXPECT_EQ(run.counts.total(), 24);
  EXPECT_TRUE(run.failures.empty());

  std::multiset<std::string> placed;
  for (const char* folder : {"positive", "negative", "Human_Intervention_Needed", "quarantine"}) {
    for (const auto& e : fs::directory_iterator(tmp.path() / "out" / folder)) {
      if (e.is_regular_file() && e.path().extension() != ".txt") placed.insert(e.path().filename().string());
    }
  }
  EXPECT_EQ(std::set<std::string>(placed.begin(), placed.end()), inputs);
  EXPECT_EQ(placed.size(), inputs.size());

  for (const auto& t : triage::read_traces(tmp.path() / "out" / "traces")) {
    const auto problems = triage::validate_trace(t);
    EXPECT_TRUE(problems.empty()) << t["case_id"] << ": " << (problems.empty() ? "" : problems.front());
    EXPECT_TRUE(policy::audit_trace_safety(t, cfg.max_steps).empty()) << t["case_id"];
  }
  const auto eval = evaluate_traces(tmp.path() / "out" / "traces", read_labels(tmp.path() / "cohort" / "labels.csv"));
  EXPECT_EQ(eval.predictions.size(), 24u);
  EXPECT_DOUBLE_EQ(eval.classification.accuracy, summary.expected_accuracy());
  EXPECT_THROW(
      [&] {
        EngineConfig no_model = cfg;
        no_model.model_file = (tmp.path() / "absent.json").string();
        Engine::from_config(no_model);
      }(),
      Error);
}
