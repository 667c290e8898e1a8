// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cxrt/features/extract.hpp"

namespace cxrt::features {

/// Externally computed features: comma-separated, header row of names, one
/// row per case keyed by a `case_id` column, empty field = missing.
struct FeatureTable {
  std::vector<std::string> case_ids;
  std::vector<RawFeatureVector> rows;
};

/// One CSV record; double quotes group, backslash escapes. Throws DataError.
std::vector<std::string> split_csv_line(const std::string& line);

FeatureTable read_feature_table(std::istream& in);
FeatureTable read_feature_table_file(const std::string& path);
void write_feature_table(std::ostream& out, const FeatureTable& table);

}  // namespace cxrt::features
