// SPDX-License-Identifier: Apache-2.0
#include "cxrt/features/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "cxrt/error.hpp"

namespace cxrt::features {

namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

FeatureCatalog fit_catalog(std::span<const RawFeatureVector> reference) {
  if (reference.empty()) throw DataError("feature catalog needs a non-empty reference set");

  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> column_of;
  for (const auto& row : reference) {
    if (row.names.size() != row.values.size()) throw DataError("feature names and values differ in length");
    std::unordered_set<std::string> seen;
    for (const auto& name : row.names) {
      if (!seen.insert(name).second) throw DataError("duplicate feature name: " + name);
      if (column_of.try_emplace(name, order.size()).second) order.push_back(name);
    }
  }

  const std::size_t n = reference.size();
  std::vector<std::vector<std::optional<double>>> columns(order.size(), std::vector<std::optional<double>>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = reference[r];
    for (std::size_t i = 0; i < row.names.size(); ++i) {
      const auto& v = row.values[i];
      columns[column_of.at(row.names[i])][r] = (v && std::isfinite(*v)) ? v : std::nullopt;
    }
  }

  FeatureCatalog catalog;
  for (std::size_t c = 0; c < order.size(); ++c) {
    std::vector<double> present;
    for (const auto& v : columns[c]) {
      if (v) present.push_back(*v);
    }
    if (present.empty()) {
      catalog.removed_all_missing.push_back(order[c]);
      continue;
    }
    const double fill = median_of(present);
    std::vector<double> filled(n);
    for (std::size_t r = 0; r < n; ++r) filled[r] = columns[c][r].value_or(fill);

    if (std::all_of(filled.begin(), filled.end(), [](double v) { return v == 0.0; })) {
      catalog.removed_all_zero.push_back(order[c]);
      continue;
    }
    if (std::all_of(filled.begin(), filled.end(), [&](double v) { return v == filled.front(); })) {
      catalog.removed_zero_variance.push_back(order[c]);
      continue;
    }
    catalog.retained.push_back(order[c]);
    catalog.impute_values.push_back(fill);
  }
  if (catalog.retained.empty()) throw DataError("degenerate feature space");
  return catalog;
}

Eigen::VectorXd align(const RawFeatureVector& raw, const FeatureCatalog& catalog) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < raw.names.size(); ++i) index.emplace(raw.names[i], i);
  Eigen::VectorXd out(static_cast<Eigen::Index>(catalog.dimension()));
  for (std::size_t k = 0; k < catalog.dimension(); ++k) {
    double value = catalog.impute_values[k];
    if (auto it = index.find(catalog.retained[k]); it != index.end()) {
      const auto& v = raw.values[it->second];
      if (v && std::isfinite(*v)) value = *v;
    }
    out[static_cast<Eigen::Index>(k)] = value;
  }
  return out;
}

RawFeatureVector to_raw(const Eigen::VectorXd& aligned, const FeatureCatalog& catalog) {
  RawFeatureVector raw;
  raw.names = catalog.retained;
  raw.values.reserve(catalog.dimension());
  for (Eigen::Index i = 0; i < aligned.size(); ++i) raw.values.emplace_back(aligned[i]);
  return raw;
}

}  // namespace cxrt::features
