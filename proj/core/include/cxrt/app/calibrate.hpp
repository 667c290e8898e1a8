// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "cxrt/features/extract.hpp"
#include "cxrt/ood/model_file.hpp"

namespace cxrt::app {

struct CalibrationOptions {
  double lambda_rel = ood::kDefaultLambdaRel;
  double percentile = ood::kDefaultPercentile;
};

struct CalibrationReport {
  std::size_t dimension = 0;
  std::size_t reference_count = 0;
  double ridge_lambda = 0.0;
  double tau_ood = 0.0;
  std::string feature_source;
  std::vector<std::string> skipped;  // reference files that could not be read
  std::string model_path;

  nlohmann::ordered_json to_json() const;
};

/// Built-in features for every readable image in `dir` (sorted by name).
/// Unreadable files are listed in `skipped`.
std::vector<features::RawFeatureVector> reference_features(const std::filesystem::path& dir,
                                                           std::vector<std::string>* skipped = nullptr);

/// Fits the model bundle on a reference image directory and writes it.
/// Throws DataError for an empty or degenerate reference.
CalibrationReport calibrate_from_directory(const std::filesystem::path& dir, const std::filesystem::path& model_out,
                                           const CalibrationOptions& options = {});

/// Same from an external feature table.
CalibrationReport calibrate_from_table(const std::filesystem::path& table, const std::filesystem::path& model_out,
                                       const CalibrationOptions& options = {});

}  // namespace cxrt::app
