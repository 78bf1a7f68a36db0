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

// Treatment-effect estimation between bias axes.
//
// For a source axis X and target axis Y the initial deviation is the
// Wasserstein-1 distance of Y's distribution in the initial-prompt images from
// the ideal; the post-intervention deviation uses Y's distribution across the
// counterfactual images of X, which represent every attribute of X equally.
// Intersectional Sensitivity is the initial deviation minus the
// post-intervention one: positive when intervening on X moves Y toward the
// ideal.

#ifndef ISAUDIT_EFFECTS_HPP_
#define ISAUDIT_EFFECTS_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "isaudit/contingency.hpp"
#include "isaudit/core_model.hpp"
#include "isaudit/error.hpp"
#include "isaudit/stats.hpp"

namespace isaudit {

struct SensitivityEntry {
  double is = 0.0;
  double w_init = 0.0;
  double w_post = 0.0;

  bool operator==(const SensitivityEntry&) const = default;
};

// Keyed by (from_axis, to_axis); std::map keeps the pairs lexicographically
// ordered, which the report writers rely on.
struct SensitivityMatrix {
  std::map<std::pair<std::string, std::string>, SensitivityEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
};

inline CategoricalDist initial_distribution(const ValidatedDataset& ds,
                                            std::string_view by) {
  const AxisSchema& axis = ds.axis(by);
  if (!ds.has_variant(VariantKey::Init())) {
    throw Error(ErrorKind::kEmptyCounts, "dataset '" + ds.prompt_id() +
                                             "' has no initial-prompt images");
  }
  return normalize(variant_counts(ds, VariantKey::Init(), by), axis.name);
}

inline CategoricalDist ideal_distribution(const IdealSpec& spec,
                                          const AxisSchema& axis) {
  struct Visitor {
    const AxisSchema& axis;

    CategoricalDist operator()(const IdealSpec::Uniform&) const {
      return uniform_distribution(axis.size(), axis.name);
    }
    CategoricalDist operator()(const IdealSpec::Explicit& e) const {
      auto it = e.dists.find(axis.name);
      if (it == e.dists.end()) {
        throw Error(ErrorKind::kMissingAxisInSpec,
                    "explicit ideal has no distribution for '" + axis.name +
                        "'");
      }
      CategoricalDist dist = it->second;
      dist.axis = axis.name;
      if (dist.size() != axis.size()) {
        throw Error(ErrorKind::kAxisMismatch,
                    "explicit ideal for '" + axis.name + "' has " +
                        std::to_string(dist.size()) + " entries, axis has " +
                        std::to_string(axis.size()));
      }
      CheckDistribution(dist);
      return dist;
    }
    CategoricalDist operator()(const IdealSpec::Reference& r) const {
      if (!r.dataset) {
        throw Error(ErrorKind::kMissingAxisInSpec, "reference dataset not set");
      }
      auto idx = r.dataset->axis_index(axis.name);
      if (!idx) {
        throw Error(ErrorKind::kMissingAxisInSpec,
                    "reference dataset has no axis '" + axis.name + "'");
      }
      if (r.dataset->axes()[*idx].attributes != axis.attributes) {
        throw Error(ErrorKind::kAxisMismatch,
                    "reference dataset orders '" + axis.name +
                        "' differently");
      }
      return initial_distribution(*r.dataset, axis.name);
    }
  };
  return std::visit(Visitor{axis}, spec.mode);
}

// Distribution of `by` once `bx` is intervened on: the per-counterfactual
// distributions of `by` combined with equal weight (or pooled raw counts).
inline CategoricalDist intervened_distribution(
    const ValidatedDataset& ds, std::string_view bx, std::string_view by,
    InterventionPooling pooling = InterventionPooling::kAverage) {
  CheckInterventionPair(ds, bx, by);
  const AxisSchema& source = ds.axis(bx);
  const AxisSchema& target = ds.axis(by);

  if (pooling == InterventionPooling::kPool) {
    CountVector pooled;
    pooled.counts.assign(target.size(), 0);
    for (const auto& label : source.attributes) {
      auto c = variant_counts(ds, VariantKey::Counterfactual(source.name, label),
                              by);
      for (std::size_t i = 0; i < c.size(); ++i) pooled.counts[i] += c.counts[i];
    }
    return normalize(pooled, target.name);
  }

  CategoricalDist out{target.name, std::vector<double>(target.size(), 0.0)};
  for (const auto& label : source.attributes) {
    auto c = variant_counts(ds, VariantKey::Counterfactual(source.name, label), by);
    if (c.total() == 0) {
      throw Error(ErrorKind::kEmptyCounts,
                  "counterfactual " + source.name + "=" + label +
                      " has no answers for '" + target.name + "'");
    }
    const auto d = normalize(c, target.name);
    for (std::size_t i = 0; i < d.size(); ++i) out.probs[i] += d.probs[i];
  }
  const double j = static_cast<double>(source.size());
  for (auto& p : out.probs) p /= j;
  return out;
}

// Deviation of `dist` from the ideal, using the axis's own geometry.
inline double deviation(const CategoricalDist& dist, const CategoricalDist& ideal,
                        const AxisSchema& axis, const AnalysisConfig& cfg) {
  return wasserstein1(dist, ideal, axis.metric, cfg.normalize_support);
}

inline double initial_deviation(const ValidatedDataset& ds, std::string_view by,
                                const IdealSpec& spec,
                                const AnalysisConfig& cfg) {
  const AxisSchema& axis = ds.axis(by);
  return deviation(initial_distribution(ds, by), ideal_distribution(spec, axis),
                   axis, cfg);
}

inline SensitivityEntry MakeSensitivity(double w_init, double w_post) {
  return SensitivityEntry{w_init - w_post, w_init, w_post};
}

inline SensitivityEntry intersectional_sensitivity(const ValidatedDataset& ds,
                                                   std::string_view bx,
                                                   std::string_view by,
                                                   const IdealSpec& spec,
                                                   const AnalysisConfig& cfg) {
  const AxisSchema& axis = ds.axis(by);
  const auto ideal = ideal_distribution(spec, axis);
  const double w_init = deviation(initial_distribution(ds, by), ideal, axis, cfg);
  const double w_post = deviation(
      intervened_distribution(ds, bx, by, cfg.pooling), ideal, axis, cfg);
  return MakeSensitivity(w_init, w_post);
}

inline SensitivityEntry intersectional_sensitivity(const ValidatedDataset& ds,
                                                   std::string_view bx,
                                                   std::string_view by,
                                                   const AnalysisConfig& cfg) {
  return intersectional_sensitivity(ds, bx, by, cfg.ideal, cfg);
}

// Same as intersectional_sensitivity but the post-intervention distribution is
// read from `replacement`: images generated after actually mitigating `bx`.
// When the replacement carries a full set of `bx` counterfactuals the
// intervened distribution is formed from them; otherwise its initial-prompt
// images are used directly.
inline SensitivityEntry sensitivity_with_reference(
    const ValidatedDataset& ds, const ValidatedDataset& replacement,
    std::string_view bx, std::string_view by, const IdealSpec& spec,
    const AnalysisConfig& cfg) {
  ds.axis(bx);
  if (bx == by) {
    throw Error(ErrorKind::kSameAxis,
                "axis '" + std::string(bx) + "' cannot target itself");
  }
  const AxisSchema& axis = ds.axis(by);
  const AxisSchema& replaced = replacement.axis(by);
  if (replaced.attributes != axis.attributes) {
    throw Error(ErrorKind::kAxisMismatch,
                "replacement dataset orders '" + axis.name + "' differently");
  }
  const auto ideal = ideal_distribution(spec, axis);
  const double w_init = deviation(initial_distribution(ds, by), ideal, axis, cfg);
  const CategoricalDist post =
      replacement.is_intervenable(bx)
          ? intervened_distribution(replacement, bx, by, cfg.pooling)
          : initial_distribution(replacement, by);
  return MakeSensitivity(w_init, deviation(post, ideal, axis, cfg));
}

// Sensitivities for every ordered pair whose source axis is intervenable.
// Pairs that cannot be evaluated are skipped and, if `warnings` is given,
// reported there.
inline SensitivityMatrix all_pair_sensitivities(
    const ValidatedDataset& ds, const AnalysisConfig& cfg,
    std::vector<Warning>* warnings = nullptr) {
  SensitivityMatrix m;
  for (const auto& bx : ds.axes()) {
    if (!ds.is_intervenable(bx.name)) continue;
    for (const auto& by : ds.axes()) {
      if (bx.name == by.name) continue;
      try {
        m.entries.emplace(std::make_pair(bx.name, by.name),
                          intersectional_sensitivity(ds, bx.name, by.name, cfg));
      } catch (const Error& e) {
        if (warnings != nullptr) {
          warnings->push_back(
              {"is_unavailable", bx.name + "->" + by.name, e.what()});
        }
      }
    }
  }
  return m;
}

// Sum of |IS| over all entries. Large values mean strong entanglement between
// axes relative to the ideal in use.
inline double amplification_index(const SensitivityMatrix& m) {
  double sum = 0.0;
  for (const auto& [pair, entry] : m.entries) sum += std::abs(entry.is);
  return sum;
}

// Fraction of entries where the intervention moved the target away from the
// ideal.
inline double negative_fraction(const SensitivityMatrix& m) {
  if (m.empty()) {
    throw Error(ErrorKind::kEmptyMatrix, "no sensitivities to summarize");
  }
  std::size_t negative = 0;
  for (const auto& [pair, entry] : m.entries)
    if (entry.is < 0.0) ++negative;
  return static_cast<double>(negative) / static_cast<double>(m.size());
}

}  // namespace isaudit

#endif  // ISAUDIT_EFFECTS_HPP_
