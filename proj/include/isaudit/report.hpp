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

// Analysis reports (bcreport-v1), Graphviz output, robustness reports
// (bcrobust-v1) and correlation summaries (bccorr-v1).

#ifndef ISAUDIT_REPORT_HPP_
#define ISAUDIT_REPORT_HPP_

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "isaudit/aggregate.hpp"
#include "isaudit/core_model.hpp"
#include "isaudit/discovery.hpp"
#include "isaudit/effects.hpp"
#include "isaudit/io.hpp"
#include "isaudit/robustness.hpp"
#include "isaudit/stats.hpp"

namespace isaudit {

inline constexpr char kReportSchema[] = "bcreport-v1";
inline constexpr char kRobustnessSchema[] = "bcrobust-v1";
inline constexpr char kCorrelationSchema[] = "bccorr-v1";

struct AnalysisReport {
  std::string scope = "prompt";  // prompt | global | reference | mitigation
  std::string prompt_id;
  std::vector<std::string> provenance;
  AnalysisConfig config;
  std::vector<std::string> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::pair<std::string, double>> initial_deviations;
  SensitivityMatrix matrix;
  std::vector<Warning> warnings;
};

namespace detail {

inline void AppendUnique(std::vector<Warning>& out,
                         const std::vector<Warning>& in) {
  for (const auto& w : in) {
    if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  }
}

inline std::vector<std::pair<std::string, double>> InitialDeviations(
    const ValidatedDataset& ds, const AnalysisConfig& cfg,
    std::vector<Warning>& warnings) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& axis : ds.axes()) {
    try {
      out.emplace_back(axis.name, initial_deviation(ds, axis.name, cfg.ideal, cfg));
    } catch (const Error& e) {
      warnings.push_back({"deviation_unavailable", axis.name, e.what()});
    }
  }
  return out;
}

}  // namespace detail

// Discovery plus the all-pairs sensitivity matrix for one dataset.
inline AnalysisReport run_analysis(const ValidatedDataset& ds,
                                   const AnalysisConfig& cfg,
                                   std::string scope = "prompt") {
  AnalysisReport report;
  report.scope = std::move(scope);
  report.prompt_id = ds.prompt_id();
  report.config = cfg;
  auto graph = discover_graph(ds, cfg);
  report.nodes = graph.nodes;
  report.edges = graph.edges;
  report.warnings = ds.warnings();
  report.initial_deviations = detail::InitialDeviations(ds, cfg, report.warnings);
  std::vector<Warning> matrix_warnings;
  report.matrix = all_pair_sensitivities(ds, cfg, &matrix_warnings);
  detail::AppendUnique(report.warnings, graph.warnings);
  detail::AppendUnique(report.warnings, matrix_warnings);
  return report;
}

inline AnalysisReport run_global_analysis(const GlobalDataset& g,
                                          const AnalysisConfig& cfg) {
  AnalysisReport report = run_analysis(g.dataset, cfg, "global");
  report.provenance = g.provenance;
  return report;
}

// Sensitivities measured against images generated after mitigating each axis
// in `mitigated` (axis -> post-mitigation dataset), for every target axis.
inline AnalysisReport run_mitigation_analysis(
    const ValidatedDataset& ds,
    const std::map<std::string, ValidatedDataset>& mitigated,
    const AnalysisConfig& cfg) {
  CheckConfig(cfg);
  AnalysisReport report;
  report.scope = "mitigation";
  report.prompt_id = ds.prompt_id();
  report.config = cfg;
  for (const auto& a : ds.axes()) report.nodes.push_back(a.name);
  report.warnings = ds.warnings();
  report.initial_deviations = detail::InitialDeviations(ds, cfg, report.warnings);
  for (const auto& [bx, post] : mitigated) {
    ds.axis(bx);
    for (const auto& by : ds.axes()) {
      if (by.name == bx) continue;
      try {
        report.matrix.entries.emplace(
            std::make_pair(bx, by.name),
            sensitivity_with_reference(ds, post, bx, by.name, cfg.ideal, cfg));
      } catch (const Error& e) {
        report.warnings.push_back({"is_unavailable", bx + "->" + by.name, e.what()});
      }
    }
  }
  return report;
}

inline Json ReportToJson(const AnalysisReport& r) {
  Json j = Json::object();
  j["schema"] = kReportSchema;
  j["scope"] = r.scope;
  j["prompt_id"] = r.prompt_id;
  if (!r.provenance.empty()) j["provenance"] = r.provenance;
  j["config"] = ConfigToJson(r.config);
  j["nodes"] = r.nodes;
  Json edges = Json::array();
  for (const auto& e : r.edges) {
    Json je = Json::object();
    je["from"] = e.from;
    je["to"] = e.to;
    je["chi_statistic"] = e.chi_statistic;
    je["df"] = e.df;
    je["p_value"] = e.p_value;
    if (e.is) {
      je["is"] = *e.is;
      je["w_init"] = e.w_init;
      je["w_post"] = e.w_post;
    } else {
      je["is"] = nullptr;
      je["w_init"] = nullptr;
      je["w_post"] = nullptr;
    }
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  Json dev = Json::object();
  for (const auto& [axis, w] : r.initial_deviations) dev[axis] = w;
  j["initial_deviations"] = std::move(dev);
  Json matrix = Json::array();
  for (const auto& [pair, s] : r.matrix.entries) {
    Json jm = Json::object();
    jm["from"] = pair.first;
    jm["to"] = pair.second;
    jm["is"] = s.is;
    jm["w_init"] = s.w_init;
    jm["w_post"] = s.w_post;
    matrix.push_back(std::move(jm));
  }
  j["matrix"] = std::move(matrix);
  Json summary = Json::object();
  summary["amplification_index"] = amplification_index(r.matrix);
  summary["negative_fraction"] =
      r.matrix.empty() ? Json(nullptr) : Json(negative_fraction(r.matrix));
  summary["edge_count"] = r.edges.size();
  j["summary"] = std::move(summary);
  Json warnings = Json::array();
  for (const auto& w : r.warnings) {
    Json jw = Json::object();
    jw["code"] = w.code;
    jw["subject"] = w.subject;
    jw["detail"] = w.detail;
    warnings.push_back(std::move(jw));
  }
  j["warnings"] = std::move(warnings);
  return j;
}

// IS values keyed by (from, to) as read back from a bcreport-v1 file.
struct ReportSensitivities {
  std::map<std::pair<std::string, std::string>, double> edges;
  std::map<std::pair<std::string, std::string>, double> matrix;
};

inline ReportSensitivities ReportSensitivitiesFromJson(
    const Json& j, std::string_view where = "report") {
  detail::CheckSchemaTag(j, kReportSchema, where);
  ReportSensitivities out;
  const auto read = [&](const char* key, auto& dest) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array()) detail::FormatFail(where, std::string("'") + key + "' must be an array");
    for (const auto& e : *it) {
      const auto& is = detail::Field(e, "is", where);
      if (is.is_null()) continue;
      dest[{detail::String(detail::Field(e, "from", where), where),
            detail::String(detail::Field(e, "to", where), where)}] =
          detail::Number(is, where);
    }
  };
  read("edges", out.edges);
  read("matrix", out.matrix);
  return out;
}

namespace detail {

inline std::string DotQuote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

// One node per axis and one edge per graph edge, labeled with IS to three
// decimals. Negative-IS edges are dashed.
inline std::string RenderDot(const std::string& name,
                             std::vector<std::string> nodes,
                             std::vector<GraphEdge> edges) {
  std::sort(nodes.begin(), nodes.end());
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    return std::tie(a.from, a.to) < std::tie(b.from, b.to);
  });
  std::string out = "digraph " + detail::DotQuote(name) + " {\n";
  for (const auto& n : nodes) out += "  " + detail::DotQuote(n) + ";\n";
  for (const auto& e : edges) {
    out += "  " + detail::DotQuote(e.from) + " -> " + detail::DotQuote(e.to);
    if (e.is) {
      char label[64];
      std::snprintf(label, sizeof label, "%.3f", *e.is);
      out += " [label=\"" + std::string(label) + "\"";
      if (*e.is < 0.0) out += ", style=dashed";
      out += "]";
    } else {
      out += " [label=\"n/a\"]";
    }
    out += ";\n";
  }
  out += "}\n";
  return out;
}

struct RenderedOutputs {
  std::string report;
  std::string dot;
};

inline RenderedOutputs render_outputs(const AnalysisReport& r) {
  return {WriteJson(ReportToJson(r)), RenderDot(r.prompt_id, r.nodes, r.edges)};
}

inline RenderedOutputs render_outputs(const PairwiseCausalGraph& graph,
                                      const SensitivityMatrix& m,
                                      const AnalysisConfig& cfg,
                                      std::string prompt_id = "prompt") {
  AnalysisReport r;
  r.prompt_id = std::move(prompt_id);
  r.config = cfg;
  r.nodes = graph.nodes;
  r.edges = graph.edges;
  r.matrix = m;
  r.warnings = graph.warnings;
  return render_outputs(r);
}

inline Json RobustnessToJson(const RobustnessReport& r,
                             const AnalysisConfig& cfg) {
  const bool subsample = r.mode == RobustnessMode::kSubsample;
  Json j = Json::object();
  j["schema"] = kRobustnessSchema;
  j["mode"] = subsample ? "subsample" : "vqa-error";
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["config"] = ConfigToJson(cfg);
  j["full_edge_count"] = r.full_edge_count;
  Json levels = Json::array();
  for (const auto& level : r.levels) {
    Json jl = Json::object();
    if (subsample) {
      jl["level"] = static_cast<std::uint64_t>(level.level);
    } else {
      jl["level"] = level.level;
    }
    jl["trials"] = level.trials;
    jl["mean_edge_diff"] = level.mean_edge_diff;
    jl["mean_is_shift_pct"] = level.mean_is_shift_pct;
    jl["mean_abs_is_shift"] = level.mean_abs_is_shift;
    Json trials = Json::array();
    for (const auto& t : level.per_trial) {
      Json jt = Json::object();
      jt["seed"] = t.seed;
      jt["edge_diff"] = t.edge_diff;
      jt["is_shift_pct"] = t.is_shift_pct;
      jt["abs_is_shift"] = t.abs_is_shift;
      jt["common_edges"] = t.common_edges;
      if (!subsample) {
        jt["flips"] = t.flips;
        jt["answers"] = t.answers;
      }
      trials.push_back(std::move(jt));
    }
    jl["per_trial"] = std::move(trials);
    levels.push_back(std::move(jl));
  }
  j["levels"] = std::move(levels);
  return j;
}

struct CorrelationResult {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<double> pre;
  std::vector<double> post;
  double r = 0.0;
};

// Pairs every edge of the pre-mitigation report with the post report's value
// for the same (from, to): its edge if present, otherwise its matrix entry.
inline CorrelationResult correlate_reports(const ReportSensitivities& pre,
                                           const ReportSensitivities& post) {
  CorrelationResult out;
  for (const auto& [key, value] : pre.edges) {
    std::optional<double> match;
    if (auto it = post.edges.find(key); it != post.edges.end()) {
      match = it->second;
    } else if (auto m = post.matrix.find(key); m != post.matrix.end()) {
      match = m->second;
    }
    if (!match) continue;
    out.pairs.push_back(key);
    out.pre.push_back(value);
    out.post.push_back(*match);
  }
  out.r = pearson_correlation(out.pre, out.post);
  return out;
}

inline Json CorrelationToJson(const CorrelationResult& c) {
  Json j = Json::object();
  j["schema"] = kCorrelationSchema;
  j["n"] = c.pairs.size();
  j["r"] = c.r;
  Json pairs = Json::array();
  for (std::size_t i = 0; i < c.pairs.size(); ++i) {
    Json jp = Json::object();
    jp["from"] = c.pairs[i].first;
    jp["to"] = c.pairs[i].second;
    jp["pre_is"] = c.pre[i];
    jp["post_is"] = c.post[i];
    pairs.push_back(std::move(jp));
  }
  j["pairs"] = std::move(pairs);
  return j;
}

}  // namespace isaudit

#endif  // ISAUDIT_REPORT_HPP_
