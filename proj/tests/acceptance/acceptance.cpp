// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cxrt/analytics/selective.hpp"
#include "cxrt/app/batch.hpp"
#include "cxrt/app/calibrate.hpp"
#include "cxrt/app/cohort.hpp"
#include "cxrt/app/config.hpp"
#include "cxrt/app/engine.hpp"
#include "cxrt/app/evaluate.hpp"
#include "cxrt/error.hpp"
#include "cxrt/ood/reference_model.hpp"
#include "cxrt/policy/guardrail.hpp"
#include "cxrt/policy/router.hpp"
#include "cxrt/policy/safety.hpp"
#include "cxrt/quantify/lwi.hpp"
#include "cxrt/quantify/masks.hpp"
#include "cxrt/quantify/pipeline.hpp"
#include "cxrt/quantify/suppression.hpp"
#include "cxrt/tools/vlm.hpp"
#include "cxrt/triage/schema.hpp"
#include "cxrt/triage/trace.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace cxrt;
using cxrt::testing::Gen;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
  void check(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

// ---------------------------------------------------------------- 1

Verdict guardrail_grid() {
  Verdict v;
  const auto t0 = Clock::now();
  long mismatches = 0, cells = 0;
  for (double tau_ood : {0.5, 2.5, 3.25}) {
    policy::Thresholds th;
    th.tau_ood = tau_ood;
    std::vector<double> cs, ms;
    for (int i = 0; i <= 400; ++i) cs.push_back(0.5 + 0.00125 * i);
    for (int j = 0; j <= 400; ++j) ms.push_back(tau_ood * 2.0 * j / 400);
    for (double x : {th.tau_conf, std::nextafter(th.tau_conf, 0.0), std::nextafter(th.tau_conf, 1.0)}) cs.push_back(x);
    for (double x : {tau_ood, std::nextafter(tau_ood, 0.0), std::nextafter(tau_ood, 10.0)}) ms.push_back(x);
    for (double c : cs) {
      for (double m : ms) {
        const auto r = policy::evaluate_guardrail(c, m, th);
        const bool ood = m > tau_ood;
        const bool allow = !ood && c >= th.tau_conf;
        ++cells;
        if (r.ood != ood || r.allowed.allow_accept != allow || r.allowed.contains(policy::Action::accept) != allow) {
          ++mismatches;
        }
      }
    }
  }
  const double s = seconds_since(t0);
  v.check(mismatches == 0, std::to_string(mismatches) + " mismatches");
  v.check(s < 1.0, "took " + std::to_string(s) + " s");
  if (v.pass) v.detail = std::to_string(cells) + " cells, 0 mismatches, " + std::to_string(s) + " s";
  return v;
}

// ---------------------------------------------------------------- 2

using Matrix = std::vector<std::vector<double>>;

Matrix invert(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(inv[col], inv[pivot]);
    const double p = a[col][col];
    for (std::size_t k = 0; k < n; ++k) {
      a[col][k] /= p;
      inv[col][k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t k = 0; k < n; ++k) {
        a[r][k] -= f * a[col][k];
        inv[r][k] -= f * inv[col][k];
      }
    }
  }
  return inv;
}

Verdict mahalanobis_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  Gen g(2024);
  double worst = 0, worst_scale = 0;
  for (int t = 0; t < 1000; ++t) {
    const int d = g.integer(1, 5);
    Matrix a(d, std::vector<double>(d)), sigma(d, std::vector<double>(d));
    for (auto& row : a) {
      for (double& x : row) x = g.normal();
    }
    Eigen::MatrixXd S(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        double s = i == j ? 0.2 : 0.0;
        for (int k = 0; k < d; ++k) s += a[i][k] * a[j][k];
        sigma[i][j] = s;
        S(i, j) = s;
      }
    }
    Eigen::VectorXd mu(d), z(d);
    for (int i = 0; i < d; ++i) {
      mu[i] = g.normal(0, 3);
      z[i] = g.normal(0, 3);
    }
    const Matrix inv = invert(sigma);
    double q = 0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) q += (z[i] - mu[i]) * inv[i][j] * (z[j] - mu[j]);
    }
    const auto model = ood::ReferenceModel::from_parts(mu, S, 0.0, 10);
    const double got = model.mahalanobis(z);
    worst = std::max(worst, std::abs(got - std::sqrt(q)));
    const double c = g.uniform(0.1, 20.0);
    const auto scaled = ood::ReferenceModel::from_parts(mu, c * S, 0.0, 10);
    worst_scale = std::max(worst_scale, std::abs(scaled.mahalanobis(z) - got / std::sqrt(c)));
  }
  const double s = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max |delta| %.3g, scale max |delta| %.3g, %.3f s", worst, worst_scale, s);
  v.check(worst <= 1e-9, buf);
  v.check(worst_scale <= 1e-9, buf);
  v.check(s < 5.0, buf);
  if (v.pass) v.detail = buf;
  return v;
}

// ---------------------------------------------------------------- 3

Verdict tau_calibration() {
  Verdict v;
  std::vector<double> scores(100);
  std::iota(scores.begin(), scores.end(), 1.0);
  v.check(ood::calibrate_tau(scores, 95.0) == 95.0, "scores 1..100 did not give 95");
  Gen g(31);
  int worst_trial = -1;
  double worst_excess = -1;
  for (int t = 0; t < 2000; ++t) {
    const int n = g.integer(1, 500);
    std::vector<double> s;
    for (int i = 0; i < n; ++i) s.push_back(g.coin(0.2) ? std::round(g.uniform(0, 5)) : g.uniform(0, 5));
    const double tau = ood::calibrate_tau(s);
    const auto flagged = std::count_if(s.begin(), s.end(), [&](double x) { return x > tau; });
    const double excess = static_cast<double>(flagged) / n - (0.05 + 1.0 / n);
    if (excess > worst_excess) {
      worst_excess = excess;
      worst_trial = t;
    }
  }
  v.check(worst_excess <= 0, "self-flag bound exceeded in trial " + std::to_string(worst_trial));
  if (v.pass) v.detail = "tau(1..100)=95, 2000 reference sets within 0.05 + 1/n";
  return v;
}

// ---------------------------------------------------------------- 4

Verdict selective_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  Gen g(99);
  long cases = 0, mismatches = 0;
  const double coverages[] = {0.1, 0.2, 0.25, 0.3, 0.5, 0.75, 0.8, 0.9, 1.0};
  const double budgets[] = {0.0, 0.05, 0.1, 0.2, 0.25, 1.0 / 3.0, 0.5, 1.0};
  for (int n = 1; n <= 8; ++n) {
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<double> conf;
      while (static_cast<int>(conf.size()) < n) {
        const double c = g.uniform(0.5, 1.0);
        if (std::find(conf.begin(), conf.end(), c) == conf.end()) conf.push_back(c);
      }
      std::vector<analytics::LabeledPrediction> preds;
      for (int i = 0; i < n; ++i) {
        analytics::LabeledPrediction p;
        p.case_id = "c" + std::to_string(i);
        p.true_label = Label::positive;
        p.predicted_label = (mask >> i) & 1 ? Label::positive : Label::negative;
        p.confidence = conf[static_cast<std::size_t>(i)];
        preds.push_back(p);
      }
      // Brute force: the k most confident are those with fewer than k above them.
      std::vector<double> risk;
      for (int k = 1; k <= n; ++k) {
        int errors = 0;
        for (const auto& p : preds) {
          int above = 0;
          for (const auto& q : preds) above += q.confidence > p.confidence;
          if (above < k && !p.correct()) ++errors;
        }
        risk.push_back(static_cast<double>(errors) / k);
      }
      double sum = 0;
      for (double r : risk) sum += r;
      const auto curve = analytics::risk_coverage_curve(preds);
      ++cases;
      bool ok = analytics::aurc(curve) == sum / n;
      for (double c : coverages) {
        int k = 1;
        while (k < n && k < c * n - 1e-9) ++k;
        ok = ok && analytics::risk_at_coverage(curve, c) == risk[static_cast<std::size_t>(k - 1)];
      }
      for (double b : budgets) {
        double best = 0;
        for (int k = 1; k <= n; ++k) {
          if (risk[static_cast<std::size_t>(k - 1)] <= b) best = static_cast<double>(k) / n;
        }
        ok = ok && analytics::coverage_at_risk(curve, b) == best;
      }
      if (!ok) ++mismatches;
    }
  }
  const double s = seconds_since(t0);
  v.check(mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(cases) + " patterns mismatch");
  v.check(s < 30.0, "took " + std::to_string(s) + " s");
  if (v.pass) v.detail = std::to_string(cases) + " patterns exact, " + std::to_string(s) + " s";
  return v;
}

// ---------------------------------------------------------------- 5, 6

struct Script {
  std::optional<std::vector<double>> tta;
  std::optional<int> moe_positive;  // of 4 experts
  std::optional<std::string> vlm;
};

policy::FunctionToolbox make_toolbox(const Script& s) {
  policy::FunctionToolbox box;
  box.tta_fn = [s]() -> tools::TtaResult {
    if (!s.tta) throw AdapterError("tta unavailable");
    return tools::summarize_tta(*s.tta);
  };
  box.moe_fn = [s](Label base) -> tools::MoeResult {
    if (!s.moe_positive) throw AdapterError("moe unavailable");
    std::vector<Label> v;
    for (int i = 0; i < 4; ++i) v.push_back(i < *s.moe_positive ? Label::positive : Label::negative);
    return tools::aggregate_votes(v, base);
  };
  box.vlm_fn = [s]() -> tools::VlmResult {
    if (!s.vlm) throw AdapterError("vlm unavailable");
    return tools::parse_vlm_response(*s.vlm);
  };
  return box;
}

constexpr double kThr = 5.0;
const std::vector<double> kStable = {0.80, 0.81, 0.79, 0.80};
const std::vector<double> kNoisy = {0.2, 0.9, 0.4, 0.7};

json trace_of(const policy::CaseSession& s) {
  triage::TraceRecord rec;
  rec.case_id = "acceptance";
  rec.session = &s;
  return json::parse(triage::trace_to_json(rec).dump());
}

Verdict rule_router_table() {
  Verdict v;
  struct Row {
    std::string name;
    double p;
    double m;
    Script script;
    triage::Decision decision;
    Label label;
    policy::DecidedBy by;
    std::string rationale;  // empty: not checked
    std::vector<std::string> events;
    std::vector<std::string> decisions;
  };
  using policy::DecidedBy;
  using triage::Decision;
  const std::string vlm_no = tools::format_vlm_block(Label::negative, "0.30", "no effusion");
  const std::vector<Row> rows = {
      {"direct accept (positive)", 0.9, 1.0, {}, Decision::accept, Label::positive, DecidedBy::guardrail_direct, "",
       {}, {"accept"}},
      {"direct accept (negative)", 0.1, 1.0, {}, Decision::accept, Label::negative, DecidedBy::guardrail_direct, "",
       {}, {"accept"}},
      {"tta pass", 0.55, 1.0, {kStable, 4, vlm_no}, Decision::accept, Label::positive, DecidedBy::tta, "",
       {"tta"}, {"tta", "accept"}},
      {"tta fail, moe pass", 0.55, 1.0, {kNoisy, 3, vlm_no}, Decision::accept, Label::positive, DecidedBy::moe, "",
       {"tta", "moe"}, {"tta", "moe", "accept"}},
      {"tta fail, moe pass (negative)", 0.45, 1.0, {kNoisy, 0, vlm_no}, Decision::accept, Label::negative,
       DecidedBy::moe, "", {"tta", "moe"}, {"tta", "moe", "accept"}},
      {"full escalation to vlm", 0.55, 1.0, {kNoisy, 2, vlm_no}, Decision::abstain, Label::negative, DecidedBy::vlm,
       "no effusion", {"tta", "moe", "vlm"}, {"tta", "moe", "vlm"}},
      {"ood high confidence escalates", 0.99, kThr + 1, {kNoisy, 2, vlm_no}, Decision::abstain, Label::negative,
       DecidedBy::vlm, "no effusion", {"tta", "moe", "vlm"}, {"tta", "moe", "vlm"}},
      {"vlm parse failure", 0.55, 1.0, {kNoisy, 2, std::string("free text")}, Decision::abstain, Label::positive,
       DecidedBy::fallback, "vlm_parse_failure", {"tta", "moe", "vlm"}, {"tta", "moe", "vlm"}},
      {"tool chain failure", 0.45, 1.0, {}, Decision::abstain, Label::negative, DecidedBy::fallback,
       "tool_chain_failure", {"tta", "moe", "vlm"}, {"tta", "moe", "vlm"}},
      {"vlm unavailable", 0.55, 1.0, {kNoisy, 2, std::nullopt}, Decision::abstain, Label::positive,
       DecidedBy::fallback, "vlm_unavailable", {"tta", "moe", "vlm"}, {"tta", "moe", "vlm"}},
      {"tta down, moe pass", 0.55, 1.0, {std::nullopt, 4, vlm_no}, Decision::accept, Label::positive,
       DecidedBy::moe, "", {"tta", "moe"}, {"tta", "moe", "accept"}},
  };
  const auto pol = policy::RouterPolicy::from_thresholds(policy::Thresholds{});
  int deviations = 0;
  for (const auto& row : rows) {
    policy::CaseSession s(policy::CaseSignals{tools::derive_confidence(row.p), row.m, kThr, 1e-6},
                          policy::Thresholds{});
    auto box = make_toolbox(row.script);
    const auto& out = policy::run_rule_router(s, box, pol);
    std::vector<std::string> events, decisions;
    for (const auto& e : s.tool_events()) events.push_back(e.tool);
    for (const auto& d : s.decisions()) decisions.emplace_back(policy::to_string(d.next_tool));
    const bool ok = out.decision == row.decision && out.final_label == row.label && out.decided_by == row.by &&
                    (row.rationale.empty() || out.rationale == row.rationale) && events == row.events &&
                    decisions == row.decisions && s.violations().empty() &&
                    policy::audit_trace_safety(trace_of(s), policy::kDefaultMaxSteps).empty();
    if (!ok) {
      ++deviations;
      v.fail("row '" + row.name + "' deviates (rationale '" + out.rationale + "')");
    }
  }
  if (v.pass) v.detail = std::to_string(rows.size()) + " branches, 0 deviations";
  return v;
}

Verdict adversarial_llm() {
  Verdict v;
  Gen g(6);
  const std::vector<std::string> actions = {"accept", "accept", "tta", "moe", "vlm", "abstain", "POST_ACCEPT",
                                            "ACCEPT", "escalate", ""};
  const std::vector<std::string> labels = {"PE_yes", "PE_no", "yes"};
  const auto pol = policy::RouterPolicy::from_thresholds(policy::Thresholds{});
  int unsafe = 0, over_budget = 0, unfinished = 0, accepts = 0;
  for (int t = 0; t < 500; ++t) {
    const double p = g.uniform();
    const double m = g.uniform(0, 2 * kThr);
    const int max_steps = g.integer(1, 8);
    Script sc;
    if (g.coin(0.7)) sc.tta = g.coin() ? kStable : kNoisy;
    if (g.coin(0.7)) sc.moe_positive = g.integer(0, 4);
    if (g.coin(0.6)) sc.vlm = tools::format_vlm_block(Label::positive, "0.6", "fluid");
    else if (g.coin()) sc.vlm = "garbage";
    auto rng = std::make_shared<Gen>(g.engine()());
    const int style = g.integer(0, 3);
    tools::ScriptedChatClient llm("adversary", [rng, style, &actions, &labels](const tools::ChatRequest&) {
      Gen& r = *rng;
      switch (style) {
        case 0: return std::string(R"({"next_tool": "accept", "stop": true, "final_label": "PE_yes"})");
        case 1:
          if (r.coin(0.5)) return std::string("I would accept this one.");
          break;
        case 2: return std::string(R"({"next_tool": "tta", "stop": true})");
        default: break;
      }
      json reply = {{"next_tool", r.pick(actions)}, {"reason", "fuzz"}, {"stop", r.coin()}};
      if (r.coin()) reply["final_label"] = r.pick(labels);
      if (r.coin(0.05)) reply["next_tool"] = 7;
      return reply.dump();
    });
    policy::CaseSession s(policy::CaseSignals{tools::derive_confidence(p), m, kThr, 1e-6}, policy::Thresholds{});
    auto box = make_toolbox(sc);
    try {
      const auto& out = policy::run_llm_router(s, box, llm, pol, max_steps);
      if (out.decision == triage::Decision::accept) {
        ++accepts;
        if (!(s.guardrail().allowed.allow_accept || s.tta_passed() || s.moe_passed())) ++unsafe;
      }
    } catch (const std::exception& e) {
      ++unfinished;
      v.fail(std::string("router threw: ") + e.what());
      continue;
    }
    if (!s.finished()) ++unfinished;
    if (static_cast<int>(s.decisions().size()) > max_steps) ++over_budget;
    if (!policy::audit_trace_safety(trace_of(s), max_steps).empty()) ++unsafe;
  }
  v.check(unsafe == 0, std::to_string(unsafe) + " unsafe traces");
  v.check(over_budget == 0, std::to_string(over_budget) + " cases exceeded max_steps");
  v.check(unfinished == 0, std::to_string(unfinished) + " cases without an outcome");
  if (v.pass) v.detail = "500 adversarial cases safe and bounded (" + std::to_string(accepts) + " accepts)";
  return v;
}

// ---------------------------------------------------------------- 7

Verdict lwi_suite() {
  Verdict v;
  Gen g(7);
  Image flat(16, 16);
  for (double& x : flat.values()) x = 0.375;
  Mask full(16, 16);
  for (auto& x : full.values()) x = 1;
  v.check(std::abs(quantify::compute_lwi(flat, full).lwi - 0.375) <= 1e-12, "uniform image");

  Image two(8, 8);
  Mask lung(8, 8);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      two(r, c) = c < 4 ? 0.1 : 0.7;
      lung(r, c) = c >= 2 && c < 7 ? 1 : 0;  // 2 dark + 3 bright columns
    }
  }
  v.check(std::abs(quantify::compute_lwi(two, lung).lwi - (2 * 0.1 + 3 * 0.7) / 5) <= 1e-12, "two-region image");

  for (int t = 0; t < 200; ++t) {
    const Image im = cxrt::testing::random_image(g, 24, 24);
    Mask m = cxrt::testing::random_mask(g, 24, 24, 0.3);
    m(3, 3) = 1;
    long double sum = 0;
    long n = 0;
    for (std::size_t i = 0; i < m.values().size(); ++i) {
      if (m.values()[i]) {
        sum += im.values()[i];
        ++n;
      }
    }
    if (std::abs(quantify::compute_lwi(im, m).lwi - static_cast<double>(sum / n)) > 1e-12) {
      v.fail("random image oracle, trial " + std::to_string(t));
      break;
    }
  }

  for (int t = 0; t < 100; ++t) {
    const Image im = cxrt::testing::random_image(g, 48, 48);
    const Mask ribs = quantify::SyntheticSegmenter::rib_mask(48, 48);
    Mask dev = cxrt::testing::random_mask(g, 48, 48, 0.02);
    const Image once = quantify::suppress_ribs(im, ribs);
    const auto devs = quantify::suppress_devices(im, dev, nullptr);
    for (std::size_t i = 0; i < im.values().size(); ++i) {
      if (!ribs.values()[i] && once.values()[i] != im.values()[i]) {
        v.fail("rib fill changed an outside-mask pixel");
        break;
      }
      if (!dev.values()[i] && devs.image.values()[i] != im.values()[i]) {
        v.fail("device fill changed an outside-mask pixel");
        break;
      }
    }
    if (quantify::suppress_ribs(once, ribs) != once) v.fail("rib fill is not idempotent");
  }

  // Quantification must not touch the routed outcome or the case pixels.
  ingestion::CaseRecord rec;
  rec.case_id = "lwi";
  rec.pixels = cxrt::testing::random_image(g, 128, 128);
  const Image pixels_before = rec.pixels;
  policy::CaseSession s(policy::CaseSignals{tools::derive_confidence(0.92), 1.0, kThr, 1e-6}, policy::Thresholds{});
  auto box = make_toolbox({});
  policy::run_rule_router(s, box, policy::RouterPolicy::from_thresholds(policy::Thresholds{}));
  const nlohmann::ordered_json before = s.outcome()->to_json();
  quantify::QuantifyAdapters adapters;
  adapters.segmentation.lung = std::make_shared<quantify::SyntheticSegmenter>();
  adapters.segmentation.rib = adapters.segmentation.lung;
  adapters.segmentation.device = adapters.segmentation.lung;
  tools::IntensityStubScorer cam;
  const auto q = quantify::quantify_case(rec, adapters, &cam);
  v.check(q.lwi.has_value(), "quantification produced no LWI");
  v.check(s.outcome()->to_json() == before, "outcome changed during quantification");
  v.check(rec.pixels == pixels_before, "case pixels changed during quantification");
  if (v.pass) v.detail = "oracles within 1e-12, locality and idempotence hold, outcome unchanged";
  return v;
}

// ---------------------------------------------------------------- 8

struct Decided {
  std::string status, decision, label, by, rationale, destination;
  bool operator==(const Decided&) const = default;
};

std::map<std::string, Decided> decisions_of(const fs::path& traces) {
  std::map<std::string, Decided> out;
  for (const auto& t : triage::read_traces(traces)) {
    Decided d;
    d.status = t.value("status", "");
    if (t.contains("decision") && t["decision"].is_object()) {
      d.decision = t["decision"].value("decision", "");
      d.label = t["decision"].value("final_label", "");
      d.by = t["decision"].value("decided_by", "");
      d.rationale = t["decision"].value("rationale", "");
    }
    const auto& dest = t["artifacts"]["destination"];
    d.destination = dest.is_string() ? fs::path(dest.get<std::string>()).parent_path().filename().string() : "";
    out[t["case_id"].get<std::string>()] = d;
  }
  return out;
}

struct PipelineRun {
  app::CohortSummary cohort;
  app::RunSummary run;
  app::EvalReport eval;
  double seconds = 0;
  fs::path root;
};

PipelineRun run_pipeline(const fs::path& root, std::uint64_t seed) {
  PipelineRun r;
  r.root = root;
  fs::remove_all(root);
  fs::create_directories(root);
  const auto t0 = Clock::now();
  app::SyntheticCohortSpec spec;
  spec.n_cases = 200;
  spec.ood_fraction = 0.1;
  spec.seed = seed;
  r.cohort = app::generate_cohort(spec, root / "cohort");
  app::calibrate_from_directory(root / "cohort" / "reference", root / "model.json");
  fs::copy(root / "cohort" / "cases", root / "input");
  app::EngineConfig cfg = app::load_config(
      std::nullopt, {},
      json{{"paths",
            {{"input", (root / "input").string()},
             {"output", (root / "out").string()},
             {"model", (root / "model.json").string()},
             {"stub_behavior", (root / "cohort" / "stub_behavior.json").string()},
             {"scratch", (root / "scratch").string()}}}});
  const app::Engine engine = app::Engine::from_config(cfg);
  r.run = app::run_batch(engine, cfg.input_dir);
  r.eval = app::evaluate_traces(root / "out" / "traces", app::read_labels(root / "cohort" / "labels.csv"));
  r.seconds = seconds_since(t0);
  return r;
}

Verdict end_to_end(const fs::path& work) {
  Verdict v;
  PipelineRun first;
  try {
    first = run_pipeline(work / "run1", 7);
  } catch (const std::exception& e) {
    v.fail(std::string("pipeline failed: ") + e.what());
    return v;
  }
  const int n = first.cohort.n_cases;
  v.check(n == 200 && first.run.cases == 200, "expected 200 cases, ran " + std::to_string(first.run.cases));
  v.check(first.cohort.ood == 20, "expected 20 OOD cases, cohort has " + std::to_string(first.cohort.ood));

  // Reconciliation: every input file is in exactly one destination folder.
  std::map<std::string, int> placed;
  for (const char* folder : {"positive", "negative", "Human_Intervention_Needed", "quarantine", "holding"}) {
    const fs::path dir = first.root / "out" / folder;
    if (!fs::exists(dir)) continue;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().string().find(".suggestion.txt") == std::string::npos) {
        ++placed[e.path().filename().string()];
      }
    }
  }
  int reconciled = 0;
  for (const auto& e : fs::directory_iterator(first.root / "cohort" / "cases")) {
    if (placed[e.path().filename().string()] == 1) ++reconciled;
  }
  v.check(reconciled == n && static_cast<int>(placed.size()) == n &&
              fs::is_empty(first.root / "input"),
          std::to_string(reconciled) + " of " + std::to_string(n) + " cases reconcile to one destination");

  const auto traces = triage::read_traces(first.root / "out" / "traces");
  int invalid = 0;
  for (const auto& t : traces) invalid += !triage::validate_trace(t).empty();
  v.check(static_cast<int>(traces.size()) == n, std::to_string(traces.size()) + " traces for " + std::to_string(n) + " cases");
  v.check(invalid == 0, std::to_string(invalid) + " traces fail the schema");

  const double expected = first.cohort.expected_accuracy();
  char acc[160];
  std::snprintf(acc, sizeof acc, "accuracy %.6f vs planted %d/%d", first.eval.classification.accuracy,
                first.cohort.planted_correct, n);
  v.check(first.eval.predictions.size() == static_cast<std::size_t>(n), "not every case was evaluated");
  v.check(first.eval.classification.accuracy == expected, acc);

  PipelineRun second;
  try {
    second = run_pipeline(work / "run2", 7);
  } catch (const std::exception& e) {
    v.fail(std::string("rerun failed: ") + e.what());
    return v;
  }
  const auto d1 = decisions_of(first.root / "out" / "traces");
  const auto d2 = decisions_of(second.root / "out" / "traces");
  v.check(d1 == d2 && !d1.empty(), "rerun with the same seed changed decisions");

  const double orch = first.run.mean_orchestration_ms;
  char timing[200];
  std::snprintf(timing, sizeof timing, "orchestration %.1f ms/case, total %.1f s", orch, first.seconds);
  v.check(orch <= 50.0, timing);
  v.check(first.seconds < 60.0, timing);
  if (v.pass) {
    const auto& c = first.run.counts;
    v.detail = std::string(acc) + "; " + timing + "; accepted_pos " + std::to_string(c.accepted_pos) +
               ", accepted_neg " + std::to_string(c.accepted_neg) + ", abstained " + std::to_string(c.abstained);
  }
  return v;
}

// ---------------------------------------------------------------- 9

Verdict protocol_grammar() {
  Verdict v;
  Gen g(9);
  int roundtrip_fail = 0;
  for (int t = 0; t < 1000; ++t) {
    const int digits = g.integer(1, 4);
    const long scale = static_cast<long>(std::pow(10, digits));
    const long units = g.integer(0, static_cast<int>(scale));
    char conf[32];
    std::snprintf(conf, sizeof conf, "%.*f", digits, static_cast<double>(units) / scale);
    const double value = std::stod(conf);
    const Label label = value >= 0.5 ? Label::positive : Label::negative;
    std::string expl = g.ascii(30, "abcdefghij klmnop,.;:()-");
    expl = "e" + expl + "z";
    std::string text = tools::format_vlm_block(label, conf, expl);
    if (g.coin()) text = "Here is my answer:\n" + text + "\nThanks.";
    try {
      const auto r = tools::parse_vlm_response(text);
      if (r.label != label || r.conf != value || r.explanation != expl) ++roundtrip_fail;
    } catch (const tools::VlmParseError&) {
      ++roundtrip_fail;
    }
  }
  v.check(roundtrip_fail == 0, std::to_string(roundtrip_fail) + " valid lines failed to round-trip");

  // Router replies: valid decisions parse to their source values.
  int router_fail = 0;
  for (const char* a : {"accept", "tta", "moe", "vlm", "abstain", "POST_ACCEPT"}) {
    const json reply = {{"next_tool", a}, {"reason", "r"}, {"stop", true}, {"final_label", "PE_no"}};
    const auto r = policy::parse_router_reply("ok " + reply.dump());
    if (!r.next_tool || policy::to_string(*r.next_tool) != a || !r.stop || r.final_label != Label::negative) {
      ++router_fail;
    }
  }
  v.check(router_fail == 0, "router reply round trip failed");

  // Invalid lines: each mutation targets one rule; all must be rejected and classified.
  std::map<std::string, int> kinds;
  int accepted_invalid = 0;
  auto mutate = [&](int kind) -> std::string {
    const std::string expl = "x" + g.ascii(10, "abc ");
    const bool pos = g.coin();
    const std::string good_conf = pos ? "0.9" : "0.1";
    const std::string lab = pos ? "1" : "0";
    switch (kind) {
      case 0: return lab + "|" + good_conf + "|" + expl;  // no markers
      case 1: {
        const auto b = tools::format_vlm_block(pos ? Label::positive : Label::negative, good_conf, expl);
        return b + "\n" + b;
      }
      case 2: return "===LINE===\n" + lab + "|" + good_conf + "\n===END===";
      case 3: return "===LINE===\n" + lab + "|" + good_conf + "|" + expl + "|extra\n===END===";
      case 4: return "===LINE===\n" + g.pick(std::vector<std::string>{"2", "yes", "PE_yes", "", "01"}) + "|" +
                     good_conf + "|" + expl + "\n===END===";
      case 5: return "===LINE===\n" + lab + "|" +
                     g.pick(std::vector<std::string>{"high", "-0.5", "1e-1", "0.5.5", "", "nan", "0,9"}) + "|" + expl +
                     "\n===END===";
      case 6: return "===LINE===\n" + lab + "|" + g.pick(std::vector<std::string>{"1.5", "2", "10.0", "1.0001"}) +
                     "|" + expl + "\n===END===";
      case 7: return "===LINE===\n" + lab + "|" + good_conf + "|   \n===END===";
      default: return "===LINE===\n" + lab + "|" + (pos ? "0.2" : "0.8") + "|" + expl + "\n===END===";
    }
  };
  for (int t = 0; t < 1000; ++t) {
    const std::string text = mutate(t % 9);
    try {
      tools::parse_vlm_response(text);
      ++accepted_invalid;
    } catch (const tools::VlmParseError& e) {
      ++kinds[std::string(tools::to_string(e.failure()))];
    }
  }
  v.check(accepted_invalid == 0, std::to_string(accepted_invalid) + " invalid lines were accepted");
  v.check(kinds.size() == 8, "only " + std::to_string(kinds.size()) + " failure classes observed");
  if (v.pass) {
    v.detail = "1000 valid lines round-trip; 1000 invalid lines rejected across " + std::to_string(kinds.size()) +
               " classes";
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  app::tune_allocator();
  fs::path work = fs::temp_directory_path() / "cxrt-acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--work-dir" && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--work-dir DIR]\n", argv[0]);
      return 1;
    }
  }
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"guardrail conformance", guardrail_grid},
      {"mahalanobis oracle", mahalanobis_oracle},
      {"tau calibration", tau_calibration},
      {"selective metrics oracle", selective_oracle},
      {"rule router decision table", rule_router_table},
      {"safety under adversarial router", adversarial_llm},
      {"lwi and suppression", lwi_suite},
      {"end-to-end synthetic run", [&] { return end_to_end(work); }},
      {"vlm/router protocol grammar", protocol_grammar},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    failures += !v.pass;
    std::printf("criterion %zu: %s  %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
