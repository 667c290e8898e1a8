// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>

#include "cxrt/features/catalog.hpp"
#include "cxrt/features/extract.hpp"
#include "cxrt/features/standardizer.hpp"
#include "cxrt/ood/reference_model.hpp"

namespace cxrt::ood {

inline constexpr int kModelFileVersion = 1;

/// Everything needed to turn a raw feature vector into an OOD signal.
struct ModelBundle {
  features::FeatureCatalog catalog;
  features::Standardizer standardizer;
  ReferenceModel reference;
  double percentile = kDefaultPercentile;
  std::string feature_source = "builtin";

  Eigen::VectorXd project(const features::RawFeatureVector& raw) const;
  OodSignal score(const features::RawFeatureVector& raw) const { return score_case(project(raw), reference); }
};

/// Catalog -> align -> standardizer -> reference Gaussian -> tau from the
/// reference self-scores.
ModelBundle fit_model_bundle(std::span<const features::RawFeatureVector> reference,
                             double lambda_rel = kDefaultLambdaRel, double percentile = kDefaultPercentile,
                             std::string feature_source = "builtin");

/// Deterministic JSON text; identical bundles serialize to identical bytes.
std::string serialize_model(const ModelBundle& bundle);
ModelBundle parse_model(std::string_view text);

void save_model(const std::string& path, const ModelBundle& bundle);
ModelBundle load_model(const std::string& path);

}  // namespace cxrt::ood
