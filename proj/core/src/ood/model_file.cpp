// SPDX-License-Identifier: Apache-2.0
#include "cxrt/ood/model_file.hpp"

#include <nlohmann/json.hpp>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"

namespace cxrt::ood {

using json = nlohmann::ordered_json;

Eigen::VectorXd ModelBundle::project(const features::RawFeatureVector& raw) const {
  return features::standardize(features::align(raw, catalog), standardizer);
}

ModelBundle fit_model_bundle(std::span<const features::RawFeatureVector> reference, double lambda_rel,
                             double percentile, std::string feature_source) {
  features::FeatureCatalog catalog = features::fit_catalog(reference);
  std::vector<Eigen::VectorXd> aligned;
  aligned.reserve(reference.size());
  for (const auto& raw : reference) aligned.push_back(features::align(raw, catalog));
  features::Standardizer standardizer = features::fit_standardizer(aligned);

  std::vector<Eigen::VectorXd> zs;
  zs.reserve(aligned.size());
  for (const auto& a : aligned) zs.push_back(features::standardize(a, standardizer));
  ReferenceModel model = ReferenceModel::fit(zs, lambda_rel);

  std::vector<double> scores;
  scores.reserve(zs.size());
  for (const auto& z : zs) scores.push_back(model.mahalanobis(z));
  model.set_tau_ood(calibrate_tau(scores, percentile));
  return ModelBundle{std::move(catalog), std::move(standardizer), std::move(model), percentile,
                     std::move(feature_source)};
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd json_to_vec(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr.at(i).get<double>();
  return v;
}

}  // namespace

std::string serialize_model(const ModelBundle& bundle) {
  json doc;
  doc["format"] = "cxrt.model";
  doc["version"] = kModelFileVersion;
  doc["feature_source"] = bundle.feature_source;

  json catalog;
  catalog["retained"] = bundle.catalog.retained;
  catalog["impute_values"] = bundle.catalog.impute_values;
  catalog["removed_all_zero"] = bundle.catalog.removed_all_zero;
  catalog["removed_zero_variance"] = bundle.catalog.removed_zero_variance;
  catalog["removed_all_missing"] = bundle.catalog.removed_all_missing;
  doc["catalog"] = std::move(catalog);

  doc["standardizer"] = {{"mean", vec_to_json(bundle.standardizer.mean)},
                         {"stddev", vec_to_json(bundle.standardizer.stddev)}};

  const ReferenceModel& ref = bundle.reference;
  json cov = json::array();
  for (Eigen::Index r = 0; r < ref.covariance().rows(); ++r) cov.push_back(vec_to_json(ref.covariance().row(r).transpose()));
  json reference;
  reference["n_ref"] = ref.reference_count();
  reference["mean"] = vec_to_json(ref.mean());
  reference["covariance"] = std::move(cov);
  reference["lambda"] = ref.ridge_lambda();
  reference["lambda_rel"] = ref.ridge_lambda_rel();
  reference["percentile"] = bundle.percentile;
  reference["tau_ood"] = ref.tau_ood() ? json(*ref.tau_ood()) : json(nullptr);
  doc["reference"] = std::move(reference);
  return doc.dump(2) + "\n";
}

ModelBundle parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "cxrt.model") throw DataError("not a cxrt model file");
    if (doc.at("version").get<int>() != kModelFileVersion) {
      throw DataError("unsupported model file version " + doc.at("version").dump());
    }
    features::FeatureCatalog catalog;
    const json& c = doc.at("catalog");
    catalog.retained = c.at("retained").get<std::vector<std::string>>();
    catalog.impute_values = c.at("impute_values").get<std::vector<double>>();
    catalog.removed_all_zero = c.value("removed_all_zero", std::vector<std::string>{});
    catalog.removed_zero_variance = c.value("removed_zero_variance", std::vector<std::string>{});
    catalog.removed_all_missing = c.value("removed_all_missing", std::vector<std::string>{});
    if (catalog.retained.size() != catalog.impute_values.size() || catalog.retained.empty()) {
      throw DataError("model catalog is inconsistent");
    }

    features::Standardizer standardizer{json_to_vec(doc.at("standardizer").at("mean")),
                                        json_to_vec(doc.at("standardizer").at("stddev"))};
    const json& r = doc.at("reference");
    Eigen::VectorXd mean = json_to_vec(r.at("mean"));
    const json& cov_rows = r.at("covariance");
    Eigen::MatrixXd cov(mean.size(), mean.size());
    if (cov_rows.size() != static_cast<std::size_t>(mean.size())) throw DataError("covariance row count mismatch");
    for (std::size_t i = 0; i < cov_rows.size(); ++i) {
      const Eigen::VectorXd row = json_to_vec(cov_rows[i]);
      if (row.size() != mean.size()) throw DataError("covariance column count mismatch");
      cov.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    const auto d = static_cast<Eigen::Index>(catalog.dimension());
    if (standardizer.mean.size() != d || standardizer.stddev.size() != d || mean.size() != d) {
      throw DataError("model dimensions disagree with catalog");
    }
    std::optional<double> tau;
    if (!r.at("tau_ood").is_null()) tau = r.at("tau_ood").get<double>();
    auto reference = ReferenceModel::from_parts(std::move(mean), std::move(cov), r.at("lambda").get<double>(),
                                                r.at("n_ref").get<std::size_t>(), tau,
                                                r.value("lambda_rel", 0.0));
    return ModelBundle{std::move(catalog), std::move(standardizer), std::move(reference),
                       r.value("percentile", kDefaultPercentile), doc.value("feature_source", "builtin")};
  } catch (const json::exception& e) {
    throw DataError(std::string("model file is malformed: ") + e.what());
  }
}

void save_model(const std::string& path, const ModelBundle& bundle) { write_file_atomic(path, serialize_model(bundle)); }

ModelBundle load_model(const std::string& path) { return parse_model(read_text_file(path)); }

}  // namespace cxrt::ood
