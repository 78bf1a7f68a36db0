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

// Pairwise causal discovery: every ordered axis pair is tested for a shift of
// the target distribution across the counterfactuals of the source axis, and
// the significant pairs form a directed graph weighted by Intersectional
// Sensitivity.

#ifndef ISAUDIT_DISCOVERY_HPP_
#define ISAUDIT_DISCOVERY_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "isaudit/contingency.hpp"
#include "isaudit/core_model.hpp"
#include "isaudit/effects.hpp"
#include "isaudit/stats.hpp"

namespace isaudit {

struct EdgeCandidate {
  std::string from_axis;
  std::string to_axis;
  std::optional<ChiSquareResult> chi;  // nullopt: table not testable
  bool significant = false;
};

struct GraphEdge {
  std::string from;
  std::string to;
  double chi_statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  std::optional<double> is;
  double w_init = 0.0;
  double w_post = 0.0;

  bool operator==(const GraphEdge&) const = default;
};

struct PairwiseCausalGraph {
  std::vector<std::string> nodes;  // schema order
  std::vector<GraphEdge> edges;    // sorted by (from, to)
  std::vector<Warning> warnings;

  const GraphEdge* find(std::string_view from, std::string_view to) const {
    for (const auto& e : edges)
      if (e.from == from && e.to == to) return &e;
    return nullptr;
  }
};

inline EdgeCandidate test_pair(const ValidatedDataset& ds, std::string_view bx,
                               std::string_view by, const AnalysisConfig& cfg) {
  EdgeCandidate c;
  c.from_axis = std::string(bx);
  c.to_axis = std::string(by);
  c.chi = chi_square_test(build_contingency(ds, bx, by));
  c.significant = c.chi.has_value() && c.chi->p_value <= cfg.p_value_threshold;
  return c;
}

// Tests all ordered pairs whose source is intervenable. Significant pairs get
// their sensitivity attached and are kept when |IS| >= cfg.min_abs_is.
// Per-pair problems never abort the run; they become graph warnings.
inline PairwiseCausalGraph discover_graph(const ValidatedDataset& ds,
                                          const AnalysisConfig& cfg) {
  CheckConfig(cfg);
  PairwiseCausalGraph graph;
  for (const auto& axis : ds.axes()) graph.nodes.push_back(axis.name);

  std::vector<std::string> sources = ds.intervenable_axes();
  std::sort(sources.begin(), sources.end());
  std::vector<std::string> targets = graph.nodes;
  std::sort(targets.begin(), targets.end());

  for (const auto& bx : sources) {
    for (const auto& by : targets) {
      if (bx == by) continue;
      const std::string subject = bx + "->" + by;
      EdgeCandidate c = test_pair(ds, bx, by, cfg);
      if (!c.chi) {
        graph.warnings.push_back(
            {"not_testable", subject,
             "contingency table has fewer than two non-empty rows or columns"});
        continue;
      }
      if (!c.significant) continue;

      GraphEdge edge;
      edge.from = bx;
      edge.to = by;
      edge.chi_statistic = c.chi->statistic;
      edge.df = c.chi->df;
      edge.p_value = c.chi->p_value;
      try {
        const auto s = intersectional_sensitivity(ds, bx, by, cfg);
        edge.is = s.is;
        edge.w_init = s.w_init;
        edge.w_post = s.w_post;
      } catch (const Error& e) {
        graph.warnings.push_back({"is_unavailable", subject, e.what()});
      }
      if (edge.is && std::abs(*edge.is) < cfg.min_abs_is) continue;
      graph.edges.push_back(std::move(edge));
    }
  }
  return graph;
}

}  // namespace isaudit

#endif  // ISAUDIT_DISCOVERY_HPP_
