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

// Data model shared by every analysis stage: bias axes, prompt variants,
// per-image attribute records, the validated dataset and analysis settings.

#ifndef ISAUDIT_CORE_MODEL_HPP_
#define ISAUDIT_CORE_MODEL_HPP_

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "isaudit/error.hpp"
#include "isaudit/stats.hpp"

namespace isaudit {

struct AxisSchema {
  std::string name;
  std::vector<std::string> attributes;
  MetricKind metric = MetricKind::kNominal;

  std::size_t size() const { return attributes.size(); }

  std::optional<std::size_t> index_of(std::string_view label) const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
      if (attributes[i] == label) return i;
    }
    return std::nullopt;
  }

  bool operator==(const AxisSchema&) const = default;
};

inline void CheckAxisSchema(const AxisSchema& axis) {
  if (axis.name.empty()) {
    throw Error(ErrorKind::kInvalidSchema, "axis with empty name");
  }
  if (axis.attributes.size() < 2) {
    throw Error(ErrorKind::kInvalidSchema,
                "axis '" + axis.name + "' needs at least two attributes");
  }
  std::set<std::string_view> seen;
  for (const auto& label : axis.attributes) {
    if (!seen.insert(label).second) {
      throw Error(ErrorKind::kInvalidSchema, "axis '" + axis.name +
                                                 "' repeats attribute '" +
                                                 label + "'");
    }
  }
}

// Identifies one image set: the initial prompt, or the counterfactual prompt
// that forces `attribute` on `axis`.
struct VariantKey {
  std::string axis;
  std::string attribute;

  static VariantKey Init() { return {}; }
  static VariantKey Counterfactual(std::string axis, std::string attribute) {
    return {std::move(axis), std::move(attribute)};
  }

  bool is_init() const { return axis.empty(); }
  std::string ToString() const {
    return is_init() ? std::string("init") : "cf(" + axis + "=" + attribute + ")";
  }

  auto operator<=>(const VariantKey&) const = default;
};

struct ImageRecord {
  std::string image_id;
  bool has_person = true;
  // Partial: an axis the attribute extractor could not answer is absent.
  std::map<std::string, std::string> attributes;

  bool operator==(const ImageRecord&) const = default;
};

struct Variant {
  VariantKey key;
  std::vector<ImageRecord> records;

  bool operator==(const Variant&) const = default;
};

struct AttributeDataset {
  std::string prompt_id;
  std::vector<AxisSchema> axes;
  // File order is preserved.
  std::vector<Variant> variants;

  const AxisSchema* find_axis(std::string_view name) const {
    for (const auto& a : axes)
      if (a.name == name) return &a;
    return nullptr;
  }
  const Variant* find_variant(const VariantKey& key) const {
    for (const auto& v : variants)
      if (v.key == key) return &v;
    return nullptr;
  }

  bool operator==(const AttributeDataset&) const = default;
};

// Structured, machine-readable notice attached to analysis outputs.
struct Warning {
  std::string code;     // e.g. "not_testable", "non_intervenable"
  std::string subject;  // axis, variant or "from->to"
  std::string detail;

  bool operator==(const Warning&) const = default;
};

struct VariantMetadata {
  VariantKey key;
  std::size_t records = 0;  // after the person filter
  std::size_t dropped_no_person = 0;
};

class ValidatedDataset;
ValidatedDataset validate_dataset(AttributeDataset raw);

// Immutable dataset that passed validate_dataset. Besides the records it
// carries an index-coded copy of every attribute for fast counting.
class ValidatedDataset {
 public:
  static constexpr std::int16_t kMissing = -1;

  const AttributeDataset& data() const { return data_; }
  const std::string& prompt_id() const { return data_.prompt_id; }
  const std::vector<AxisSchema>& axes() const { return data_.axes; }
  const std::vector<Variant>& variants() const { return data_.variants; }
  const std::vector<VariantMetadata>& metadata() const { return metadata_; }
  const std::vector<Warning>& warnings() const { return warnings_; }

  std::size_t dropped_no_person() const {
    std::size_t n = 0;
    for (const auto& m : metadata_) n += m.dropped_no_person;
    return n;
  }

  std::optional<std::size_t> axis_index(std::string_view name) const {
    for (std::size_t i = 0; i < data_.axes.size(); ++i)
      if (data_.axes[i].name == name) return i;
    return std::nullopt;
  }

  const AxisSchema& axis(std::string_view name) const {
    auto idx = axis_index(name);
    if (!idx) {
      throw Error(ErrorKind::kUnknownAxis, "no axis named '" +
                                               std::string(name) + "'");
    }
    return data_.axes[*idx];
  }

  std::optional<std::size_t> variant_index(const VariantKey& key) const {
    auto it = variant_lookup_.find(key);
    if (it == variant_lookup_.end()) return std::nullopt;
    return it->second;
  }

  bool has_variant(const VariantKey& key) const {
    return variant_lookup_.count(key) > 0;
  }

  // True when a counterfactual variant exists for every attribute of the axis.
  bool is_intervenable(std::string_view axis_name) const {
    auto idx = axis_index(axis_name);
    return idx && intervenable_[*idx];
  }

  std::vector<std::string> intervenable_axes() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < data_.axes.size(); ++i)
      if (intervenable_[i]) out.push_back(data_.axes[i].name);
    return out;
  }

  // Attribute index of `record` on `axis`, or kMissing.
  std::int16_t code(std::size_t variant, std::size_t record,
                    std::size_t axis) const {
    return codes_[variant][record * data_.axes.size() + axis];
  }

  CountVector counts(std::size_t variant, std::size_t axis) const {
    CountVector out;
    out.counts.assign(data_.axes[axis].size(), 0);
    const std::size_t stride = data_.axes.size();
    const auto& codes = codes_[variant];
    for (std::size_t r = 0; r * stride < codes.size(); ++r) {
      const auto c = codes[r * stride + axis];
      if (c != kMissing) ++out.counts[static_cast<std::size_t>(c)];
    }
    return out;
  }

  bool operator==(const ValidatedDataset& other) const {
    return data_ == other.data_ && intervenable_ == other.intervenable_;
  }

 private:
  friend ValidatedDataset validate_dataset(AttributeDataset raw);
  ValidatedDataset() = default;

  AttributeDataset data_;
  std::vector<VariantMetadata> metadata_;
  std::vector<Warning> warnings_;
  std::vector<bool> intervenable_;
  std::map<VariantKey, std::size_t> variant_lookup_;
  std::vector<std::vector<std::int16_t>> codes_;
};

// Checks the schema and every record, removes records without a person and
// flags axes that lack a full set of counterfactual variants.
inline ValidatedDataset validate_dataset(AttributeDataset raw) {
  std::set<std::string_view> axis_names;
  for (const auto& axis : raw.axes) {
    CheckAxisSchema(axis);
    if (!axis_names.insert(axis.name).second) {
      throw Error(ErrorKind::kInvalidSchema,
                  "axis '" + axis.name + "' declared twice");
    }
  }
  if (raw.axes.size() > static_cast<std::size_t>(INT16_MAX)) {
    throw Error(ErrorKind::kInvalidSchema, "too many axes");
  }

  ValidatedDataset out;
  std::set<VariantKey> seen_keys;
  for (const auto& variant : raw.variants) {
    const auto& key = variant.key;
    if (!key.is_init()) {
      const AxisSchema* axis = raw.find_axis(key.axis);
      if (axis == nullptr) {
        throw Error(ErrorKind::kUnknownAxis, "variant " + key.ToString() +
                                                 " names an unknown axis");
      }
      if (!axis->index_of(key.attribute)) {
        throw Error(ErrorKind::kUnknownAttribute,
                    "variant " + key.ToString() + " names an attribute not in '" +
                        key.axis + "'");
      }
    }
    if (!seen_keys.insert(key).second) {
      throw Error(ErrorKind::kInvalidSchema,
                  "variant " + key.ToString() + " appears twice");
    }
    std::set<std::string_view> ids;
    for (const auto& record : variant.records) {
      if (!ids.insert(record.image_id).second) {
        throw Error(ErrorKind::kDuplicateImageId,
                    "image '" + record.image_id + "' repeated in " +
                        key.ToString());
      }
      for (const auto& [axis_name, label] : record.attributes) {
        const AxisSchema* axis = raw.find_axis(axis_name);
        if (axis == nullptr) {
          throw Error(ErrorKind::kUnknownAxis,
                      "image '" + record.image_id + "' in " + key.ToString() +
                          " answers unknown axis '" + axis_name + "'");
        }
        if (!axis->index_of(label)) {
          throw Error(ErrorKind::kUnknownAttribute,
                      "image '" + record.image_id + "' in " + key.ToString() +
                          " has '" + axis_name + "'='" + label + "'");
        }
      }
    }
  }

  const std::size_t n_axes = raw.axes.size();
  for (auto& variant : raw.variants) {
    VariantMetadata meta;
    meta.key = variant.key;
    const auto before = variant.records.size();
    std::erase_if(variant.records,
                  [](const ImageRecord& r) { return !r.has_person; });
    meta.dropped_no_person = before - variant.records.size();
    meta.records = variant.records.size();
    if (variant.records.empty()) {
      throw Error(ErrorKind::kEmptyVariant,
                  variant.key.ToString() + " has no records with a person");
    }
    if (meta.dropped_no_person > 0) {
      out.warnings_.push_back(
          {"dropped_records", variant.key.ToString(),
           std::to_string(meta.dropped_no_person) +
               " image(s) without a person removed"});
    }

    std::vector<std::int16_t> codes(variant.records.size() * n_axes,
                                    ValidatedDataset::kMissing);
    for (std::size_t r = 0; r < variant.records.size(); ++r) {
      for (std::size_t a = 0; a < n_axes; ++a) {
        const auto& attrs = variant.records[r].attributes;
        auto it = attrs.find(raw.axes[a].name);
        if (it != attrs.end()) {
          codes[r * n_axes + a] =
              static_cast<std::int16_t>(*raw.axes[a].index_of(it->second));
        }
      }
    }
    out.variant_lookup_.emplace(variant.key, out.codes_.size());
    out.codes_.push_back(std::move(codes));
    out.metadata_.push_back(std::move(meta));
  }

  out.intervenable_.assign(n_axes, false);
  for (std::size_t a = 0; a < n_axes; ++a) {
    const auto& axis = raw.axes[a];
    std::vector<std::string> missing;
    for (const auto& label : axis.attributes) {
      if (!seen_keys.count(VariantKey::Counterfactual(axis.name, label))) {
        missing.push_back(label);
      }
    }
    out.intervenable_[a] = missing.empty();
    if (!missing.empty()) {
      std::string detail = "missing counterfactual variant(s):";
      for (const auto& m : missing) detail += " " + m;
      out.warnings_.push_back({"non_intervenable", axis.name, detail});
    }
  }

  out.data_ = std::move(raw);
  return out;
}

// Counts of `axis` attributes in one variant; records that did not answer the
// axis are left out of this count only.
inline CountVector variant_counts(const ValidatedDataset& ds,
                                  const VariantKey& key,
                                  std::string_view axis) {
  auto v = ds.variant_index(key);
  if (!v) {
    throw Error(ErrorKind::kUnknownVariant,
                "dataset '" + ds.prompt_id() + "' has no " + key.ToString());
  }
  auto a = ds.axis_index(axis);
  if (!a) {
    throw Error(ErrorKind::kUnknownAxis,
                "no axis named '" + std::string(axis) + "'");
  }
  return ds.counts(*v, *a);
}

// How the per-counterfactual target distributions are combined into the
// post-intervention distribution.
enum class InterventionPooling {
  kAverage,  // equal weight per counterfactual, after normalizing each
  kPool,     // raw counts summed across counterfactuals, then normalized
};

// Target distribution every axis is compared against.
struct IdealSpec {
  struct Uniform {};
  struct Explicit {
    std::map<std::string, CategoricalDist> dists;
  };
  struct Reference {
    std::shared_ptr<const ValidatedDataset> dataset;
  };

  std::variant<Uniform, Explicit, Reference> mode = Uniform{};

  static IdealSpec MakeUniform() { return {}; }
  static IdealSpec MakeExplicit(std::map<std::string, CategoricalDist> dists) {
    return {Explicit{std::move(dists)}};
  }
  static IdealSpec MakeReference(ValidatedDataset ds) {
    return {Reference{std::make_shared<const ValidatedDataset>(std::move(ds))}};
  }
};

struct AnalysisConfig {
  double p_value_threshold = 1e-4;
  double min_abs_is = 0.0;
  IdealSpec ideal;
  bool normalize_support = false;
  InterventionPooling pooling = InterventionPooling::kAverage;
};

inline void CheckConfig(const AnalysisConfig& cfg) {
  if (!(cfg.p_value_threshold > 0.0 && cfg.p_value_threshold < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "p_value_threshold must lie in (0,1)");
  }
  if (!(cfg.min_abs_is >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "min_abs_is must be >= 0");
  }
}

}  // namespace isaudit

#endif  // ISAUDIT_CORE_MODEL_HPP_
