// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cxrt/grid.hpp"

namespace cxrt::app {

/// Cases whose planted max-class confidence falls in [c_lo, c_hi] are
/// correct with probability p_correct. tta_stable is the chance that the
/// scripted TTA samples agree tightly.
struct ReliabilityBand {
  double c_lo = 0.5;
  double c_hi = 1.0;
  double p_correct = 0.9;
  double weight = 1.0;
  double tta_stable = 0.5;

  std::string name() const;
};

struct SyntheticCohortSpec {
  int n_cases = 200;
  double positive_fraction = 0.5;
  std::vector<ReliabilityBand> bands = default_bands();
  double ood_fraction = 0.1;
  std::uint64_t seed = 0;
  int reference_cases = 100;
  int image_size = 256;
  int tta_k = 8;
  double tta_failure_fraction = 0.03;
  double vlm_garbage_fraction = 0.05;

  static std::vector<ReliabilityBand> default_bands();

  /// Probabilities in [0,1]; bands sorted, contiguous and spanning the
  /// max-class confidence range [0.5, 1]. Throws UsageError.
  void validate() const;
  nlohmann::ordered_json to_json() const;
  static SyntheticCohortSpec from_json(const nlohmann::json& j);
};

struct CohortSummary {
  int n_cases = 0;
  int positives = 0;
  int ood = 0;
  int planted_correct = 0;
  int tta_failures = 0;
  int vlm_garbage = 0;
  int reference_cases = 0;

  /// planted_correct / n_cases.
  double expected_accuracy() const noexcept {
    return n_cases > 0 ? static_cast<double>(planted_correct) / n_cases : 0.0;
  }
  nlohmann::ordered_json to_json() const;
};

/// Radiograph-like test image: soft gradient, darker lung fields, Gaussian
/// noise of `noise` sigma, and a bright opacity blob when `opacity` is set.
Gray8 synthesize_radiograph(std::mt19937_64& rng, int size, double noise, bool opacity);

/// Texture far from any radiograph: inverted field under a hard checkerboard.
Gray8 synthesize_shifted(std::mt19937_64& rng, int size);

/// Writes reference/, cases/, labels.csv, stub_behavior.json and cohort.json
/// under `out_dir`. Output bytes depend only on the cohort settings.
CohortSummary generate_cohort(const SyntheticCohortSpec& spec, const std::filesystem::path& out_dir);

}  // namespace cxrt::app
