// SPDX-License-Identifier: Apache-2.0
// cxrt: calibrate, watch, run, eval, gen-cohort.
#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <optional>
#include <stop_token>
#include <thread>

#include "cxrt/app/batch.hpp"
#include "cxrt/app/calibrate.hpp"
#include "cxrt/app/cohort.hpp"
#include "cxrt/app/config.hpp"
#include "cxrt/app/engine.hpp"
#include "cxrt/app/evaluate.hpp"
#include "cxrt/assets.hpp"
#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Flags that mirror EngineConfig keys.
struct ConfigFlags {
  std::optional<std::string> config_file;
  std::optional<double> tau_conf, tau_tta, tau_moe, frd_multiple;
  std::optional<std::string> router, policy_mode;
  std::optional<int> max_steps, workers, tta_k, retries, poll_ms, stability_ms;
  std::optional<std::uint64_t> tta_seed;
  std::optional<std::string> input, output, model, stub_behavior, feature_table;

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--tau-conf", tau_conf, "Confidence threshold");
    app.add_option("--tau-tta", tau_tta, "TTA standard-deviation threshold");
    app.add_option("--tau-moe", tau_moe, "Committee agreement threshold");
    app.add_option("--max-auto-accept-frd-multiple", frd_multiple, "Advisory OOD multiple shown to the router");
    app.add_option("--router", router, "rule or llm")->check(CLI::IsMember({"rule", "llm"}));
    app.add_option("--policy-mode", policy_mode, "default, conservative or sensitive");
    app.add_option("--max-steps", max_steps, "Router step budget");
    app.add_option("--workers", workers, "Worker threads");
    app.add_option("--tta-k", tta_k, "TTA samples");
    app.add_option("--tta-seed", tta_seed, "TTA augmentation seed");
    app.add_option("--retries", retries, "Adapter retries");
    app.add_option("--input", input, "Input folder");
    app.add_option("--output", output, "Output root");
    app.add_option("--model", model, "Model file");
    app.add_option("--stub-behavior", stub_behavior, "Scripted stub-adapter behavior (JSON)");
    app.add_option("--feature-table", feature_table, "External feature table (CSV)");
    app.add_option("--poll-ms", poll_ms, "Watch poll interval");
    app.add_option("--stability-ms", stability_ms, "Watch size-stability window");
  }

  json overrides() const {
    json o = json::object();
    const auto set = [&](const char* pointer, const auto& v) {
      if (v) o[json::json_pointer(pointer)] = *v;
    };
    set("/thresholds/tau_conf", tau_conf);
    set("/thresholds/tau_tta", tau_tta);
    set("/thresholds/tau_moe", tau_moe);
    set("/max_auto_accept_frd_multiple", frd_multiple);
    set("/router", router);
    set("/policy_mode", policy_mode);
    set("/max_steps", max_steps);
    set("/workers", workers);
    set("/tta/k", tta_k);
    set("/tta/seed", tta_seed);
    set("/retries", retries);
    set("/paths/input", input);
    set("/paths/output", output);
    set("/paths/model", model);
    set("/paths/stub_behavior", stub_behavior);
    set("/paths/feature_table", feature_table);
    set("/watch/poll_ms", poll_ms);
    set("/watch/stability_ms", stability_ms);
    return o;
  }

  cxrt::app::EngineConfig load() const {
    return cxrt::app::load_config(config_file, cxrt::app::process_environment(), overrides());
  }
};

void print(const nlohmann::ordered_json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_calibrate(const ConfigFlags& flags, const std::optional<std::string>& reference,
                  const std::optional<std::string>& table, double lambda_rel, double percentile) {
  const auto cfg = flags.load();
  if (cfg.model_file.empty()) throw cxrt::UsageError("calibrate needs --model (output path)");
  if (reference.has_value() == table.has_value()) throw cxrt::UsageError("give exactly one of --reference or --features");
  const cxrt::app::CalibrationOptions opts{lambda_rel, percentile};
  const auto report = reference ? cxrt::app::calibrate_from_directory(*reference, cfg.model_file, opts)
                                : cxrt::app::calibrate_from_table(*table, cfg.model_file, opts);
  for (const auto& s : report.skipped) std::cerr << "cxrt: skipped reference file " << s << '\n';
  print(report.to_json());
  return 0;
}

int cmd_run(const ConfigFlags& flags) {
  const auto cfg = flags.load();
  if (cfg.input_dir.empty()) throw cxrt::UsageError("run needs --input");
  const auto engine = cxrt::app::Engine::from_config(cfg);
  const auto summary = cxrt::app::run_batch(engine, cfg.input_dir);
  print(summary.to_json());
  return summary.failures.empty() ? 0 : 2;
}

int cmd_watch(const ConfigFlags& flags) {
  const auto cfg = flags.load();
  const auto engine = cxrt::app::Engine::from_config(cfg);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  std::stop_source stop;
  std::jthread waiter([&](std::stop_token self) {
    const timespec tick{0, 100'000'000};
    while (!self.stop_requested()) {
      if (sigtimedwait(&signals, nullptr, &tick) > 0) {
        std::cerr << "cxrt: shutting down after in-flight cases\n";
        stop.request_stop();
        return;
      }
    }
  });
  std::cerr << "cxrt: watching " << cfg.input_dir << '\n';
  const auto summary = cxrt::app::watch_folder(engine, stop.get_token(), [](const cxrt::app::CaseReport& r) {
    std::cerr << "cxrt: " << r.case_id << " " << r.status;
    if (r.outcome) std::cerr << " " << cxrt::triage::to_string(r.outcome->decision) << " " << cxrt::to_string(r.outcome->final_label);
    std::cerr << '\n';
  });
  waiter.request_stop();
  print(summary.to_json());
  return 0;
}

int cmd_eval(const std::string& traces, const std::string& labels_path, const std::optional<std::string>& report_out,
             const std::optional<std::string>& curve_out, std::vector<double> coverages, std::vector<double> budgets) {
  const auto labels = cxrt::app::read_labels(labels_path);
  const auto report = cxrt::app::evaluate_traces(traces, labels, coverages, budgets);
  for (const auto& id : report.missing_labels) std::cerr << "cxrt: warning: no label for " << id << "; excluded\n";
  for (const auto& id : report.undecided) std::cerr << "cxrt: warning: " << id << " has no decision; excluded\n";
  const auto j = report.to_json();
  if (report_out) cxrt::write_file_atomic(*report_out, j.dump(2) + "\n");
  if (curve_out) cxrt::write_file_atomic(*curve_out, report.curve_csv());
  print(j);
  return 0;
}

int cmd_gen_cohort(const std::string& out, const std::optional<std::string>& spec_file, cxrt::app::SyntheticCohortSpec spec) {
  if (spec_file) spec = cxrt::app::SyntheticCohortSpec::from_json(json::parse(cxrt::read_text_file(*spec_file)));
  const auto summary = cxrt::app::generate_cohort(spec, out);
  print(summary.to_json());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  cxrt::app::tune_allocator();
  CLI::App app{"Confidence-gated triage for chest radiographs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cxrt::engine_version()));

  ConfigFlags calib_flags, run_flags, watch_flags;

  auto* calibrate = app.add_subcommand("calibrate", "Fit the OOD reference model");
  calib_flags.attach(*calibrate);
  std::optional<std::string> reference, table;
  double lambda_rel = cxrt::ood::kDefaultLambdaRel;
  double percentile = cxrt::ood::kDefaultPercentile;
  calibrate->add_option("--reference", reference, "Reference image folder")->check(CLI::ExistingDirectory);
  calibrate->add_option("--features", table, "Reference feature table (CSV)")->check(CLI::ExistingFile);
  calibrate->add_option("--lambda-rel", lambda_rel, "Relative ridge");
  calibrate->add_option("--percentile", percentile, "OOD threshold percentile");

  auto* run = app.add_subcommand("run", "Process a folder to completion");
  run_flags.attach(*run);

  auto* watch = app.add_subcommand("watch", "Watch a folder until SIGINT/SIGTERM");
  watch_flags.attach(*watch);

  auto* eval = app.add_subcommand("eval", "Metrics from traces and ground truth");
  std::string traces, labels;
  std::optional<std::string> report_out, curve_out;
  std::vector<double> coverages(std::begin(cxrt::analytics::kDefaultCoverages), std::end(cxrt::analytics::kDefaultCoverages));
  std::vector<double> budgets(std::begin(cxrt::analytics::kDefaultBudgets), std::end(cxrt::analytics::kDefaultBudgets));
  eval->add_option("--traces", traces, "Trace folder")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--labels", labels, "Ground truth CSV (case_id,label)")->required()->check(CLI::ExistingFile);
  eval->add_option("--report", report_out, "Write the report JSON here");
  eval->add_option("--curve", curve_out, "Write the risk-coverage table (CSV) here");
  eval->add_option("--coverage", coverages, "Coverages for risk@coverage")->check(CLI::Range(0.0, 1.0));
  eval->add_option("--budget", budgets, "Risk budgets for coverage@risk")->check(CLI::Range(0.0, 1.0));

  auto* gen = app.add_subcommand("gen-cohort", "Write a synthetic cohort with scripted adapter behavior");
  std::string cohort_out;
  std::optional<std::string> spec_file;
  cxrt::app::SyntheticCohortSpec spec;
  gen->add_option("--out", cohort_out, "Output folder")->required();
  gen->add_option("--spec", spec_file, "Cohort spec (JSON); overrides the flags")->check(CLI::ExistingFile);
  gen->add_option("--n", spec.n_cases, "Number of cases");
  gen->add_option("--seed", spec.seed, "Random seed");
  gen->add_option("--ood-fraction", spec.ood_fraction, "Fraction of shifted cases");
  gen->add_option("--positive-fraction", spec.positive_fraction, "Fraction of positives");
  gen->add_option("--reference-cases", spec.reference_cases, "Reference images");
  gen->add_option("--image-size", spec.image_size, "Image side length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*calibrate) return cmd_calibrate(calib_flags, reference, table, lambda_rel, percentile);
    if (*run) return cmd_run(run_flags);
    if (*watch) return cmd_watch(watch_flags);
    if (*eval) return cmd_eval(traces, labels, report_out, curve_out, coverages, budgets);
    if (*gen) return cmd_gen_cohort(cohort_out, spec_file, spec);
  } catch (const cxrt::Error& e) {
    std::cerr << "cxrt: error: " << e.what() << '\n';
    return cxrt::exit_code(e.kind());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "cxrt: error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "cxrt: error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
