// SPDX-License-Identifier: Apache-2.0
#include "cxrt/triage/schema.hpp"

#include <cmath>

#include "cxrt/assets.hpp"

namespace cxrt::triage {

using nlohmann::json;

namespace {

bool has_type(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (v.is_number_float()) {
      const double d = v.get<double>();
      return std::isfinite(d) && d == std::floor(d);
    }
  }
  return false;
}

void validate(const json& v, const json& schema, const std::string& path, std::vector<std::string>& errors) {
  if (const auto t = schema.find("type"); t != schema.end()) {
    bool ok = false;
    if (t->is_string()) {
      ok = has_type(v, t->get<std::string>());
    } else {
      for (const auto& alt : *t) ok = ok || has_type(v, alt.get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + t->dump() + ", got " + v.type_name());
      return;
    }
  }
  if (const auto e = schema.find("enum"); e != schema.end()) {
    bool found = false;
    for (const auto& option : *e) found = found || option == v;
    if (!found) errors.push_back(path + ": value " + v.dump() + " not in enum");
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (const auto m = schema.find("minimum"); m != schema.end() && d < m->get<double>()) {
      errors.push_back(path + ": " + v.dump() + " below minimum " + m->dump());
    }
    if (const auto m = schema.find("maximum"); m != schema.end() && d > m->get<double>()) {
      errors.push_back(path + ": " + v.dump() + " above maximum " + m->dump());
    }
  }
  if (v.is_object()) {
    const auto props = schema.find("properties");
    if (const auto req = schema.find("required"); req != schema.end()) {
      for (const auto& key : *req) {
        if (!v.contains(key.get<std::string>())) errors.push_back(path + ": missing required key " + key.dump());
      }
    }
    const auto additional = schema.find("additionalProperties");
    for (const auto& [key, child] : v.items()) {
      if (props != schema.end() && props->contains(key)) {
        validate(child, (*props)[key], path + "/" + key, errors);
      } else if (additional != schema.end() && additional->is_boolean() && !additional->get<bool>()) {
        errors.push_back(path + ": unexpected key \"" + key + "\"");
      }
    }
  }
  if (v.is_array()) {
    if (const auto items = schema.find("items"); items != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], *items, path + "/" + std::to_string(i), errors);
    }
  }
}

}  // namespace

std::vector<std::string> validate_against_schema(const json& instance, const json& schema) {
  std::vector<std::string> errors;
  validate(instance, schema, "", errors);
  return errors;
}

const json& trace_schema() {
  static const json schema = json::parse(assets::trace_schema());
  return schema;
}

std::vector<std::string> validate_trace(const json& trace) { return validate_against_schema(trace, trace_schema()); }

}  // namespace cxrt::triage
