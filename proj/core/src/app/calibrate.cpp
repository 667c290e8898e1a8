// SPDX-License-Identifier: Apache-2.0
#include "cxrt/app/calibrate.hpp"

#include <algorithm>

#include "cxrt/error.hpp"
#include "cxrt/features/feature_table.hpp"
#include "cxrt/ingestion/case_record.hpp"
#include "cxrt/ingestion/raw_case.hpp"

namespace cxrt::app {

namespace fs = std::filesystem;

nlohmann::ordered_json CalibrationReport::to_json() const {
  return {{"d", dimension},
          {"n", reference_count},
          {"lambda", ridge_lambda},
          {"tau_ood", tau_ood},
          {"feature_source", feature_source},
          {"skipped", skipped},
          {"model", model_path}};
}

std::vector<features::RawFeatureVector> reference_features(const fs::path& dir, std::vector<std::string>* skipped) {
  if (!fs::is_directory(dir)) throw DataError("reference directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && !name.empty() && name[0] != '.') files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<features::RawFeatureVector> out;
  out.reserve(files.size());
  for (const auto& path : files) {
    try {
      const auto raw = ingestion::load_raw_case(path);
      const auto record = ingestion::normalize_case(raw, ingestion::content_case_id(raw.bytes));
      out.push_back(features::extract_features(record.pixels));
    } catch (const ingestion::QuarantineError& e) {
      if (skipped) skipped->push_back(path.filename().string() + ": " + e.reason());
    }
  }
  return out;
}

namespace {

CalibrationReport finish(const std::vector<features::RawFeatureVector>& rows, const fs::path& model_out,
                         const CalibrationOptions& options, std::string source) {
  if (rows.empty()) throw DataError("reference set is empty");
  const auto bundle = ood::fit_model_bundle(rows, options.lambda_rel, options.percentile, source);
  if (model_out.has_parent_path()) fs::create_directories(model_out.parent_path());
  ood::save_model(model_out.string(), bundle);
  CalibrationReport r;
  r.dimension = bundle.reference.dimension();
  r.reference_count = bundle.reference.reference_count();
  r.ridge_lambda = bundle.reference.ridge_lambda();
  r.tau_ood = bundle.reference.tau_ood().value_or(0.0);
  r.feature_source = std::move(source);
  r.model_path = model_out.string();
  return r;
}

}  // namespace

CalibrationReport calibrate_from_directory(const fs::path& dir, const fs::path& model_out,
                                           const CalibrationOptions& options) {
  std::vector<std::string> skipped;
  const auto rows = reference_features(dir, &skipped);
  auto report = finish(rows, model_out, options, "builtin");
  report.skipped = std::move(skipped);
  return report;
}

CalibrationReport calibrate_from_table(const fs::path& table, const fs::path& model_out,
                                       const CalibrationOptions& options) {
  const auto t = features::read_feature_table_file(table.string());
  return finish(t.rows, model_out, options, "table");
}

}  // namespace cxrt::app
