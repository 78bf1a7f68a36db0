/*
 * Copyright 2026 The isaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// JSON file formats:
//   bcattr-v1  attribute dataset
//   bcnet-v1   simulator network plus sampling settings
//   analysis configuration (untagged)
// Readers accept keys in any order; writers emit keys in a fixed order and
// print every real with 17 significant digits, so files are lossless and
// byte-reproducible.

#ifndef ISAUDIT_IO_HPP_
#define ISAUDIT_IO_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isaudit/core_model.hpp"
#include "isaudit/error.hpp"
#include "isaudit/simulator.hpp"
#include "json.hpp"

namespace isaudit {

using Json = nlohmann::ordered_json;

inline constexpr char kDatasetSchema[] = "bcattr-v1";
inline constexpr char kNetworkSchema[] = "bcnet-v1";

// ---------------------------------------------------------------------------
// Text and files

inline std::string FormatReal(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void WriteJsonValue(std::string& out, const Json& j, int indent,
                           int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        WriteJsonValue(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        WriteJsonValue(out, v, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += FormatReal(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

// Serializes with 17-significant-digit reals and a trailing newline.
inline std::string WriteJson(const Json& j, int indent = 2) {
  std::string out;
  detail::WriteJsonValue(out, j, indent, 0);
  out += '\n';
  return out;
}

inline Json ParseJsonText(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t limit = std::min<std::size_t>(
        e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(ErrorKind::kParseError,
                std::string(source) + ":" + std::to_string(line) + ":" +
                    std::to_string(column) + ": " + e.what());
  }
}

inline std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIoError, "cannot open '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw Error(ErrorKind::kIoError, "cannot read '" + path.string() + "'");
  }
  return ss.str();
}

inline void WriteTextFile(const std::filesystem::path& path,
                          std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIoError, "cannot open '" + path.string() +
                                         "' for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    throw Error(ErrorKind::kIoError, "cannot write '" + path.string() + "'");
  }
}

inline Json ReadJsonFile(const std::filesystem::path& path) {
  return ParseJsonText(ReadTextFile(path), path.string());
}

// ---------------------------------------------------------------------------
// Field access with format errors instead of nlohmann type errors

namespace detail {

[[noreturn]] inline void FormatFail(std::string_view where,
                                    const std::string& msg) {
  throw Error(ErrorKind::kParseError, std::string(where) + ": " + msg);
}

inline const Json& Field(const Json& obj, const char* key,
                         std::string_view where) {
  if (!obj.is_object()) FormatFail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) FormatFail(where, std::string("missing '") + key + "'");
  return *it;
}

inline std::string String(const Json& v, std::string_view where) {
  if (!v.is_string()) FormatFail(where, "expected a string");
  return v.get<std::string>();
}

inline double Number(const Json& v, std::string_view where) {
  if (!v.is_number()) FormatFail(where, "expected a number");
  return v.get<double>();
}

inline bool Bool(const Json& v, std::string_view where) {
  if (!v.is_boolean()) FormatFail(where, "expected true or false");
  return v.get<bool>();
}

inline std::uint64_t Unsigned(const Json& v, std::string_view where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    FormatFail(where, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

inline std::vector<std::string> Strings(const Json& v, std::string_view where) {
  if (!v.is_array()) FormatFail(where, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(String(s, where));
  return out;
}

inline std::vector<double> Numbers(const Json& v, std::string_view where) {
  if (!v.is_array()) FormatFail(where, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& s : v) out.push_back(Number(s, where));
  return out;
}

inline void CheckSchemaTag(const Json& j, const char* expected,
                           std::string_view where) {
  const std::string tag = String(Field(j, "schema", where), where);
  if (tag != expected) {
    throw Error(ErrorKind::kSchemaVersionError,
                std::string(where) + ": schema '" + tag + "', expected '" +
                    expected + "'");
  }
}

}  // namespace detail

inline std::string_view MetricName(MetricKind kind) {
  return kind == MetricKind::kOrdinal ? "ordinal" : "nominal";
}

inline MetricKind ParseMetric(std::string_view name, std::string_view where) {
  if (name == "ordinal") return MetricKind::kOrdinal;
  if (name == "nominal") return MetricKind::kNominal;
  detail::FormatFail(where, "metric must be 'ordinal' or 'nominal', got '" +
                                std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Axes and datasets

inline Json AxisToJson(const AxisSchema& axis) {
  Json j = Json::object();
  j["name"] = axis.name;
  j["attributes"] = axis.attributes;
  j["metric"] = MetricName(axis.metric);
  return j;
}

inline AxisSchema AxisFromJson(const Json& j, std::string_view where) {
  AxisSchema axis;
  axis.name = detail::String(detail::Field(j, "name", where), where);
  axis.attributes = detail::Strings(detail::Field(j, "attributes", where), where);
  if (auto it = j.find("metric"); it != j.end()) {
    axis.metric = ParseMetric(detail::String(*it, where), where);
  }
  return axis;
}

inline std::vector<AxisSchema> AxesFromJson(const Json& j,
                                            std::string_view where) {
  if (!j.is_array()) detail::FormatFail(where, "'axes' must be an array");
  std::vector<AxisSchema> axes;
  for (const auto& a : j) axes.push_back(AxisFromJson(a, where));
  return axes;
}

inline Json VariantKeyToJson(const VariantKey& key) {
  if (key.is_init()) return "init";
  Json j = Json::object();
  j["axis"] = key.axis;
  j["attribute"] = key.attribute;
  return j;
}

inline VariantKey VariantKeyFromJson(const Json& j, std::string_view where) {
  if (j.is_string()) {
    if (j.get<std::string>() != "init") {
      detail::FormatFail(where, "variant key must be \"init\" or an object");
    }
    return VariantKey::Init();
  }
  return VariantKey::Counterfactual(
      detail::String(detail::Field(j, "axis", where), where),
      detail::String(detail::Field(j, "attribute", where), where));
}

inline Json DatasetToJson(const AttributeDataset& ds) {
  Json j = Json::object();
  j["schema"] = kDatasetSchema;
  j["prompt_id"] = ds.prompt_id;
  Json axes = Json::array();
  for (const auto& a : ds.axes) axes.push_back(AxisToJson(a));
  j["axes"] = std::move(axes);
  Json variants = Json::array();
  for (const auto& v : ds.variants) {
    Json jv = Json::object();
    jv["key"] = VariantKeyToJson(v.key);
    Json records = Json::array();
    for (const auto& r : v.records) {
      Json jr = Json::object();
      jr["image_id"] = r.image_id;
      jr["has_person"] = r.has_person;
      Json attrs = Json::object();
      for (const auto& [k, val] : r.attributes) attrs[k] = val;
      jr["attributes"] = std::move(attrs);
      records.push_back(std::move(jr));
    }
    jv["records"] = std::move(records);
    variants.push_back(std::move(jv));
  }
  j["variants"] = std::move(variants);
  return j;
}

inline AttributeDataset DatasetFromJson(const Json& j,
                                        std::string_view where = "dataset") {
  detail::CheckSchemaTag(j, kDatasetSchema, where);
  AttributeDataset ds;
  ds.prompt_id = detail::String(detail::Field(j, "prompt_id", where), where);
  ds.axes = AxesFromJson(detail::Field(j, "axes", where), where);
  const Json& variants = detail::Field(j, "variants", where);
  if (!variants.is_array()) detail::FormatFail(where, "'variants' must be an array");
  for (const auto& jv : variants) {
    Variant v;
    v.key = VariantKeyFromJson(detail::Field(jv, "key", where), where);
    const Json& records = detail::Field(jv, "records", where);
    if (!records.is_array()) detail::FormatFail(where, "'records' must be an array");
    for (const auto& jr : records) {
      ImageRecord r;
      r.image_id = detail::String(detail::Field(jr, "image_id", where), where);
      if (auto it = jr.find("has_person"); it != jr.end()) {
        r.has_person = detail::Bool(*it, where);
      }
      if (auto it = jr.find("attributes"); it != jr.end()) {
        if (!it->is_object()) detail::FormatFail(where, "'attributes' must be an object");
        for (auto a = it->begin(); a != it->end(); ++a) {
          r.attributes.emplace(a.key(), detail::String(a.value(), where));
        }
      }
      v.records.push_back(std::move(r));
    }
    ds.variants.push_back(std::move(v));
  }
  return ds;
}

inline AttributeDataset read_dataset(const std::filesystem::path& path) {
  return DatasetFromJson(ReadJsonFile(path), path.string());
}

inline ValidatedDataset load_dataset(const std::filesystem::path& path) {
  return validate_dataset(read_dataset(path));
}

inline void write_dataset(const std::filesystem::path& path,
                          const AttributeDataset& ds) {
  WriteTextFile(path, WriteJson(DatasetToJson(ds)));
}

// ---------------------------------------------------------------------------
// Simulator networks

inline Json NetworkToJson(const SimConfig& cfg) {
  const BiasNetwork& net = cfg.network;
  Json j = Json::object();
  j["schema"] = kNetworkSchema;
  j["prompt_id"] = cfg.prompt_id;
  j["n_per_variant"] = cfg.n_per_variant;
  j["seed"] = cfg.seed;
  Json axes = Json::array();
  for (const auto& a : net.axes) axes.push_back(AxisToJson(a));
  j["axes"] = std::move(axes);
  Json parents = Json::object();
  for (const auto& a : net.axes) {
    const auto& p = net.parents_of(a.name);
    if (!p.empty()) parents[a.name] = p;
  }
  j["parents"] = std::move(parents);
  Json cpts = Json::object();
  for (const auto& a : net.axes) {
    auto it = net.cpts.find(a.name);
    if (it == net.cpts.end()) continue;
    Json rows = Json::array();
    for (const auto& row : it->second) {
      Json jr = Json::object();
      jr["given"] = row.given;
      jr["probs"] = row.probs;
      rows.push_back(std::move(jr));
    }
    cpts[a.name] = std::move(rows);
  }
  j["cpts"] = std::move(cpts);
  return j;
}

inline SimConfig NetworkFromJson(const Json& j, std::string_view where = "network") {
  detail::CheckSchemaTag(j, kNetworkSchema, where);
  SimConfig cfg;
  cfg.network.axes = AxesFromJson(detail::Field(j, "axes", where), where);
  if (auto it = j.find("parents"); it != j.end()) {
    if (!it->is_object()) detail::FormatFail(where, "'parents' must be an object");
    for (auto p = it->begin(); p != it->end(); ++p) {
      cfg.network.parents[p.key()] = detail::Strings(p.value(), where);
    }
  }
  const Json& cpts = detail::Field(j, "cpts", where);
  if (!cpts.is_object()) detail::FormatFail(where, "'cpts' must be an object");
  for (auto c = cpts.begin(); c != cpts.end(); ++c) {
    if (!c.value().is_array()) detail::FormatFail(where, "CPT must be an array of rows");
    auto& rows = cfg.network.cpts[c.key()];
    for (const auto& jr : c.value()) {
      CptRow row;
      if (auto g = jr.find("given"); g != jr.end()) row.given = detail::Strings(*g, where);
      row.probs = detail::Numbers(detail::Field(jr, "probs", where), where);
      rows.push_back(std::move(row));
    }
  }
  if (auto it = j.find("n_per_variant"); it != j.end()) {
    cfg.n_per_variant = static_cast<std::size_t>(detail::Unsigned(*it, where));
  }
  if (auto it = j.find("seed"); it != j.end()) cfg.seed = detail::Unsigned(*it, where);
  if (auto it = j.find("prompt_id"); it != j.end()) cfg.prompt_id = detail::String(*it, where);
  CheckNetwork(cfg.network);
  if (cfg.n_per_variant < 1) {
    throw Error(ErrorKind::kInvalidNetwork, "n_per_variant must be >= 1");
  }
  return cfg;
}

inline SimConfig load_network(const std::filesystem::path& path) {
  return NetworkFromJson(ReadJsonFile(path), path.string());
}

// ---------------------------------------------------------------------------
// Analysis configuration

inline std::string_view PoolingName(InterventionPooling p) {
  return p == InterventionPooling::kPool ? "pool" : "average";
}

// Keys present in `j` override `base`. A reference ideal names a bcattr-v1
// file, resolved against `base_dir` when relative.
inline AnalysisConfig ConfigFromJson(const Json& j, AnalysisConfig base = {},
                                     const std::filesystem::path& base_dir = {},
                                     std::string_view where = "config") {
  if (!j.is_object()) detail::FormatFail(where, "config must be an object");
  if (auto it = j.find("p_value_threshold"); it != j.end()) {
    base.p_value_threshold = detail::Number(*it, where);
  }
  if (auto it = j.find("min_abs_is"); it != j.end()) {
    base.min_abs_is = detail::Number(*it, where);
  }
  if (auto it = j.find("normalize_support"); it != j.end()) {
    base.normalize_support = detail::Bool(*it, where);
  }
  if (auto it = j.find("intervention_pooling"); it != j.end()) {
    const auto s = detail::String(*it, where);
    if (s == "average") {
      base.pooling = InterventionPooling::kAverage;
    } else if (s == "pool") {
      base.pooling = InterventionPooling::kPool;
    } else {
      detail::FormatFail(where, "intervention_pooling must be 'average' or 'pool'");
    }
  }
  if (auto it = j.find("ideal"); it != j.end()) {
    const auto mode = detail::String(detail::Field(*it, "mode", where), where);
    if (mode == "uniform") {
      base.ideal = IdealSpec::MakeUniform();
    } else if (mode == "explicit") {
      const Json& dists = detail::Field(*it, "distributions", where);
      if (!dists.is_object()) detail::FormatFail(where, "'distributions' must be an object");
      std::map<std::string, CategoricalDist> m;
      for (auto d = dists.begin(); d != dists.end(); ++d) {
        m[d.key()] = CategoricalDist{d.key(), detail::Numbers(d.value(), where)};
      }
      base.ideal = IdealSpec::MakeExplicit(std::move(m));
    } else if (mode == "reference") {
      std::filesystem::path p =
          detail::String(detail::Field(*it, "dataset", where), where);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      base.ideal = IdealSpec::MakeReference(load_dataset(p));
    } else {
      detail::FormatFail(where, "ideal mode must be uniform, explicit or reference");
    }
  }
  CheckConfig(base);
  return base;
}

inline AnalysisConfig load_config(const std::filesystem::path& path,
                                  AnalysisConfig base = {}) {
  return ConfigFromJson(ReadJsonFile(path), std::move(base),
                        path.parent_path(), path.string());
}

// Echo written into reports. Reference ideals are identified by prompt id so
// the echo does not depend on file locations.
inline Json ConfigToJson(const AnalysisConfig& cfg) {
  Json j = Json::object();
  j["p_value_threshold"] = cfg.p_value_threshold;
  j["min_abs_is"] = cfg.min_abs_is;
  j["normalize_support"] = cfg.normalize_support;
  j["intervention_pooling"] = PoolingName(cfg.pooling);
  Json ideal = Json::object();
  if (std::holds_alternative<IdealSpec::Uniform>(cfg.ideal.mode)) {
    ideal["mode"] = "uniform";
  } else if (const auto* e = std::get_if<IdealSpec::Explicit>(&cfg.ideal.mode)) {
    ideal["mode"] = "explicit";
    Json dists = Json::object();
    for (const auto& [axis, d] : e->dists) dists[axis] = d.probs;
    ideal["distributions"] = std::move(dists);
  } else {
    const auto& r = std::get<IdealSpec::Reference>(cfg.ideal.mode);
    ideal["mode"] = "reference";
    ideal["prompt_id"] = r.dataset ? r.dataset->prompt_id() : std::string();
  }
  j["ideal"] = std::move(ideal);
  return j;
}

}  // namespace isaudit

#endif  // ISAUDIT_IO_HPP_
