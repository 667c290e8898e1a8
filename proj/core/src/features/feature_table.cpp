// SPDX-License-Identifier: Apache-2.0
#include "cxrt/features/feature_table.hpp"

#include <boost/tokenizer.hpp>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>

#include "cxrt/error.hpp"

namespace cxrt::features {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Quotes a field when the reader would otherwise split or unescape it.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\\\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

}  // namespace

FeatureTable read_feature_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("feature table is empty");
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  const auto key_it = std::find(header.begin(), header.end(), "case_id");
  if (key_it == header.end()) throw DataError("feature table lacks a case_id column");
  const std::size_t key = static_cast<std::size_t>(key_it - header.begin());

  FeatureTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("feature table line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    }
    RawFeatureVector row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == key) continue;
      row.names.push_back(header[i]);
      const std::string field = trim(fields[i]);
      if (field.empty()) {
        row.values.emplace_back(std::nullopt);
        continue;
      }
      double v = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw DataError("feature table line " + std::to_string(line_no) + ": not a number: " + field);
      }
      row.values.emplace_back(v);
    }
    table.case_ids.push_back(trim(fields[key]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

FeatureTable read_feature_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature table " + path);
  return read_feature_table(in);
}

void write_feature_table(std::ostream& out, const FeatureTable& table) {
  if (table.rows.empty()) return;
  const auto& names = table.rows.front().names;
  out << "case_id";
  for (const auto& n : names) out << ',' << csv_field(n);
  out << '\n' << std::setprecision(17);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << csv_field(table.case_ids[r]);
    for (const auto& name : names) {
      out << ',';
      if (auto v = table.rows[r].get(name)) out << *v;
    }
    out << '\n';
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
  std::vector<std::string> fields;
  try {
    Tokenizer tok(line, boost::escaped_list_separator<char>('\\', ',', '"'));
    for (const auto& f : tok) fields.push_back(f);
  } catch (const boost::escaped_list_error& e) {
    throw DataError(std::string("malformed CSV line: ") + e.what());
  }
  return fields;
}


}  // namespace cxrt::features
