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

// Sensitivity of the analysis to fewer images per variant and to wrong
// attribute answers. Every trial reruns discovery on a perturbed copy of the
// dataset and is compared with the graph of the untouched data.

#ifndef ISAUDIT_ROBUSTNESS_HPP_
#define ISAUDIT_ROBUSTNESS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isaudit/core_model.hpp"
#include "isaudit/discovery.hpp"
#include "isaudit/error.hpp"
#include "isaudit/random.hpp"

namespace isaudit {

enum class RobustnessMode { kSubsample, kAnswerError };

struct TrialResult {
  std::uint64_t seed = 0;
  std::size_t edge_diff = 0;
  double is_shift_pct = 0.0;
  double abs_is_shift = 0.0;
  std::size_t common_edges = 0;
  std::size_t flips = 0;    // answer-error mode only
  std::size_t answers = 0;  // answer-error mode only
};

struct RobustnessLevel {
  double level = 0.0;  // keep count, or error rate
  std::size_t trials = 0;
  double mean_edge_diff = 0.0;
  double mean_is_shift_pct = 0.0;
  double mean_abs_is_shift = 0.0;
  std::vector<TrialResult> per_trial;
};

struct RobustnessReport {
  RobustnessMode mode = RobustnessMode::kSubsample;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::size_t full_edge_count = 0;
  std::vector<RobustnessLevel> levels;
};

inline constexpr double kShiftDenominatorFloor = 1e-9;

// Trial t of level l draws from DeriveSeed(seed, (l << 32) | t).
inline std::uint64_t TrialSeed(std::uint64_t seed, std::size_t level,
                               std::size_t trial) {
  return DeriveSeed(seed, (static_cast<std::uint64_t>(level) << 32) |
                              static_cast<std::uint64_t>(trial));
}

struct GraphComparison {
  std::size_t edge_diff = 0;
  double is_shift_pct = 0.0;
  double abs_is_shift = 0.0;
  std::size_t common_edges = 0;
};

// Edge-set symmetric difference, plus the relative and absolute IS change over
// edges present in both graphs. When the reference graph has weighted edges
// but none survive, the whole signal counts as lost: 100 % relative shift and
// the mean reference |IS| as absolute shift.
inline GraphComparison compare_graphs(const PairwiseCausalGraph& full,
                                      const PairwiseCausalGraph& other) {
  std::set<std::pair<std::string, std::string>> a;
  std::set<std::pair<std::string, std::string>> b;
  for (const auto& e : full.edges) a.emplace(e.from, e.to);
  for (const auto& e : other.edges) b.emplace(e.from, e.to);
  GraphComparison out;
  for (const auto& k : a)
    if (!b.count(k)) ++out.edge_diff;
  for (const auto& k : b)
    if (!a.count(k)) ++out.edge_diff;

  double rel = 0.0;
  double abs_sum = 0.0;
  double full_abs = 0.0;
  std::size_t weighted = 0;
  for (const auto& e : full.edges) {
    if (!e.is) continue;
    ++weighted;
    full_abs += std::abs(*e.is);
    const GraphEdge* match = other.find(e.from, e.to);
    if (match == nullptr || !match->is) continue;
    const double delta = std::abs(*match->is - *e.is);
    rel += delta / std::max(std::abs(*e.is), kShiftDenominatorFloor);
    abs_sum += delta;
    ++out.common_edges;
  }
  if (out.common_edges > 0) {
    out.is_shift_pct = 100.0 * rel / static_cast<double>(out.common_edges);
    out.abs_is_shift = abs_sum / static_cast<double>(out.common_edges);
  } else if (weighted > 0) {
    out.is_shift_pct = 100.0;
    out.abs_is_shift = full_abs / static_cast<double>(weighted);
  }
  return out;
}

inline std::size_t min_variant_size(const ValidatedDataset& ds) {
  std::size_t m = SIZE_MAX;
  for (const auto& v : ds.variants()) m = std::min(m, v.records.size());
  return ds.variants().empty() ? 0 : m;
}

// Keeps `keep` records, drawn uniformly without replacement, in every variant.
// Survivors stay in their original order.
inline AttributeDataset subsample_dataset(const ValidatedDataset& ds,
                                          std::size_t keep, Rng& rng) {
  if (keep < 1) {
    throw Error(ErrorKind::kInvalidArgument, "keep count must be >= 1");
  }
  if (keep > min_variant_size(ds)) {
    throw Error(ErrorKind::kKeepCountTooLarge,
                "keep count " + std::to_string(keep) +
                    " exceeds the smallest variant (" +
                    std::to_string(min_variant_size(ds)) + " records)");
  }
  AttributeDataset out = ds.data();
  for (auto& variant : out.variants) {
    const std::size_t n = variant.records.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < keep; ++i) {
      std::swap(idx[i], idx[i + rng.below(n - i)]);
    }
    idx.resize(keep);
    std::sort(idx.begin(), idx.end());
    std::vector<ImageRecord> kept;
    kept.reserve(keep);
    for (auto i : idx) kept.push_back(std::move(variant.records[i]));
    variant.records = std::move(kept);
  }
  return out;
}

struct InjectionResult {
  AttributeDataset data;
  std::size_t flips = 0;
  std::size_t answers = 0;
};

// Each present (record, axis) answer is replaced with probability `rate` by
// one of the axis's other attributes, chosen uniformly. Draw order: variants,
// records, axes in schema order.
inline InjectionResult inject_answer_errors(const ValidatedDataset& ds,
                                            double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "error rate must lie in [0,1]");
  }
  InjectionResult out{ds.data(), 0, 0};
  const auto& axes = out.data.axes;
  for (auto& variant : out.data.variants) {
    for (auto& record : variant.records) {
      for (const auto& axis : axes) {
        auto it = record.attributes.find(axis.name);
        if (it == record.attributes.end()) continue;
        ++out.answers;
        if (!(rng.uniform() < rate)) continue;
        const std::size_t current = *axis.index_of(it->second);
        std::size_t pick = rng.below(axis.size() - 1);
        if (pick >= current) ++pick;
        it->second = axis.attributes[pick];
        ++out.flips;
      }
    }
  }
  return out;
}

namespace detail {

inline void Summarize(RobustnessLevel& level) {
  level.trials = level.per_trial.size();
  if (level.trials == 0) return;
  double edges = 0.0;
  double shift = 0.0;
  double abs_shift = 0.0;
  for (const auto& t : level.per_trial) {
    edges += static_cast<double>(t.edge_diff);
    shift += t.is_shift_pct;
    abs_shift += t.abs_is_shift;
  }
  const double n = static_cast<double>(level.trials);
  level.mean_edge_diff = edges / n;
  level.mean_is_shift_pct = shift / n;
  level.mean_abs_is_shift = abs_shift / n;
}

inline void Record(TrialResult& t, const GraphComparison& c) {
  t.edge_diff = c.edge_diff;
  t.is_shift_pct = c.is_shift_pct;
  t.abs_is_shift = c.abs_is_shift;
  t.common_edges = c.common_edges;
}

}  // namespace detail

inline RobustnessReport subsample_experiment(const ValidatedDataset& ds,
                                             std::span<const std::size_t> keep_counts,
                                             std::size_t trials,
                                             std::uint64_t seed,
                                             const AnalysisConfig& cfg) {
  if (trials < 1) throw Error(ErrorKind::kInvalidArgument, "trials must be >= 1");
  const std::size_t limit = min_variant_size(ds);
  for (auto k : keep_counts) {
    if (k < 1) throw Error(ErrorKind::kInvalidArgument, "keep count must be >= 1");
    if (k > limit) {
      throw Error(ErrorKind::kKeepCountTooLarge,
                  "keep count " + std::to_string(k) +
                      " exceeds the smallest variant (" + std::to_string(limit) +
                      " records)");
    }
  }
  const PairwiseCausalGraph full = discover_graph(ds, cfg);
  RobustnessReport report;
  report.mode = RobustnessMode::kSubsample;
  report.seed = seed;
  report.trials = trials;
  report.full_edge_count = full.edges.size();
  for (std::size_t l = 0; l < keep_counts.size(); ++l) {
    RobustnessLevel level;
    level.level = static_cast<double>(keep_counts[l]);
    for (std::size_t t = 0; t < trials; ++t) {
      TrialResult trial;
      trial.seed = TrialSeed(seed, l, t);
      Rng rng(trial.seed);
      const auto sub = validate_dataset(subsample_dataset(ds, keep_counts[l], rng));
      detail::Record(trial, compare_graphs(full, discover_graph(sub, cfg)));
      level.per_trial.push_back(trial);
    }
    detail::Summarize(level);
    report.levels.push_back(std::move(level));
  }
  return report;
}

inline RobustnessReport error_injection_experiment(const ValidatedDataset& ds,
                                                   std::span<const double> rates,
                                                   std::size_t trials,
                                                   std::uint64_t seed,
                                                   const AnalysisConfig& cfg) {
  if (trials < 1) throw Error(ErrorKind::kInvalidArgument, "trials must be >= 1");
  for (double r : rates) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error(ErrorKind::kInvalidArgument, "error rate must lie in [0,1]");
    }
  }
  const PairwiseCausalGraph full = discover_graph(ds, cfg);
  RobustnessReport report;
  report.mode = RobustnessMode::kAnswerError;
  report.seed = seed;
  report.trials = trials;
  report.full_edge_count = full.edges.size();
  for (std::size_t l = 0; l < rates.size(); ++l) {
    RobustnessLevel level;
    level.level = rates[l];
    for (std::size_t t = 0; t < trials; ++t) {
      TrialResult trial;
      trial.seed = TrialSeed(seed, l, t);
      Rng rng(trial.seed);
      auto injected = inject_answer_errors(ds, rates[l], rng);
      trial.flips = injected.flips;
      trial.answers = injected.answers;
      const auto noisy = validate_dataset(std::move(injected.data));
      detail::Record(trial, compare_graphs(full, discover_graph(noisy, cfg)));
      level.per_trial.push_back(trial);
    }
    detail::Summarize(level);
    report.levels.push_back(std::move(level));
  }
  return report;
}

}  // namespace isaudit

#endif  // ISAUDIT_ROBUSTNESS_HPP_
