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

// Command-line front end. Exit status: 0 on success, 1 for invalid input
// (bad flags, malformed or inconsistent files), 2 for I/O failures.

#ifndef ISAUDIT_CLI_HPP_
#define ISAUDIT_CLI_HPP_

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isaudit/aggregate.hpp"
#include "isaudit/core_model.hpp"
#include "isaudit/error.hpp"
#include "isaudit/io.hpp"
#include "isaudit/report.hpp"
#include "isaudit/robustness.hpp"
#include "isaudit/simulator.hpp"

namespace isaudit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitIo = 2;

namespace detail {

inline std::vector<std::string> SplitCsv(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline double ParseDouble(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno != 0) {
    throw Error(ErrorKind::kInvalidArgument, "'" + s + "' is not a number");
  }
  return v;
}

inline std::size_t ParseCount(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  if (s.empty() || s[0] == '-') {
    throw Error(ErrorKind::kInvalidArgument, "'" + s + "' is not a count");
  }
  const auto v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno != 0) {
    throw Error(ErrorKind::kInvalidArgument, "'" + s + "' is not a count");
  }
  return static_cast<std::size_t>(v);
}

inline AnalysisConfig LoadConfigOr(const std::string& path, AnalysisConfig base) {
  if (path.empty()) {
    CheckConfig(base);
    return base;
  }
  return load_config(path, std::move(base));
}

inline void WriteReportFiles(const AnalysisReport& report, const std::string& out,
                             const std::string& dot) {
  const auto rendered = render_outputs(report);
  WriteTextFile(out, rendered.report);
  if (!dot.empty()) WriteTextFile(dot, rendered.dot);
}

}  // namespace detail

inline int RunCli(int argc, const char* const* argv, std::ostream& out,
                  std::ostream& err) {
  CLI::App app{"Intersectional bias dependency auditing"};
  app.require_subcommand(1);

  std::string data_path, config_path, out_path, dot_path;

  auto* analyze = app.add_subcommand("analyze", "Pairwise causal graph for one prompt");
  analyze->add_option("--data", data_path, "bcattr-v1 dataset")->required();
  analyze->add_option("--config", config_path, "analysis configuration");
  analyze->add_option("--out", out_path, "bcreport-v1 output")->required();
  analyze->add_option("--dot", dot_path, "Graphviz output");

  std::vector<std::string> data_paths;
  auto* aggregate = app.add_subcommand("aggregate", "Global graph across prompts");
  aggregate->add_option("--data", data_paths, "bcattr-v1 datasets")->required()->expected(1, -1);
  aggregate->add_option("--config", config_path, "analysis configuration");
  aggregate->add_option("--out", out_path, "bcreport-v1 output")->required();
  aggregate->add_option("--dot", dot_path, "Graphviz output");

  std::string mode, levels_csv;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  auto* robustness = app.add_subcommand("robustness", "Subsampling and answer-error studies");
  robustness->add_option("--data", data_path, "bcattr-v1 dataset")->required();
  robustness->add_option("--config", config_path, "analysis configuration");
  robustness->add_option("--mode", mode, "subsample | vqa-error")
      ->required()
      ->check(CLI::IsMember({"subsample", "vqa-error"}));
  robustness->add_option("--levels", levels_csv,
                         "keep counts (subsample) or error rates (vqa-error), comma separated")
      ->required();
  robustness->add_option("--trials", trials, "trials per level");
  robustness->add_option("--seed", seed, "experiment seed");
  robustness->add_option("--out", out_path, "bcrobust-v1 output")->required();

  std::string net_path;
  std::optional<std::size_t> sim_n;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::string> sim_prompt;
  auto* simulate = app.add_subcommand("simulate", "Sample a dataset from a bcnet-v1 network");
  simulate->add_option("--net", net_path, "bcnet-v1 network")->required();
  simulate->add_option("--out", out_path, "bcattr-v1 output")->required();
  simulate->add_option("--n", sim_n, "override n_per_variant");
  simulate->add_option("--seed", sim_seed, "override seed");
  simulate->add_option("--prompt-id", sim_prompt, "override prompt id");

  std::string pre_path, post_path;
  auto* validate = app.add_subcommand("validate", "Correlate pre- and post-mitigation IS");
  validate->add_option("--pre", pre_path, "bcreport-v1 before mitigation")->required();
  validate->add_option("--post", post_path, "bcreport-v1 after mitigation")->required();
  validate->add_option("--out", out_path, "bccorr-v1 output")->required();

  std::string reference_path;
  auto* compare = app.add_subcommand("compare-reference",
                                     "Sensitivities against a real-world reference");
  compare->add_option("--data", data_path, "bcattr-v1 dataset")->required();
  compare->add_option("--reference", reference_path, "bcattr-v1 reference dataset")->required();
  compare->add_option("--config", config_path, "analysis configuration");
  compare->add_option("--out", out_path, "bcreport-v1 output")->required();
  compare->add_option("--dot", dot_path, "Graphviz output");

  std::vector<std::string> mitigated_specs;
  auto* mitigation = app.add_subcommand(
      "mitigation", "Sensitivities measured on post-mitigation images");
  mitigation->add_option("--data", data_path, "bcattr-v1 dataset")->required();
  mitigation->add_option("--mitigated", mitigated_specs, "AXIS=FILE, repeatable")
      ->required()
      ->expected(1, -1);
  mitigation->add_option("--config", config_path, "analysis configuration");
  mitigation->add_option("--out", out_path, "bcreport-v1 output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (analyze->parsed()) {
      const auto ds = load_dataset(data_path);
      const auto cfg = detail::LoadConfigOr(config_path, {});
      detail::WriteReportFiles(run_analysis(ds, cfg), out_path, dot_path);
    } else if (aggregate->parsed()) {
      std::vector<ValidatedDataset> inputs;
      for (const auto& p : data_paths) inputs.push_back(load_dataset(p));
      const auto cfg = detail::LoadConfigOr(config_path, GlobalConfig());
      const auto global = aggregate_datasets(inputs);
      detail::WriteReportFiles(run_global_analysis(global, cfg), out_path, dot_path);
    } else if (robustness->parsed()) {
      const auto ds = load_dataset(data_path);
      const auto cfg = detail::LoadConfigOr(config_path, {});
      const auto parts = detail::SplitCsv(levels_csv);
      RobustnessReport report;
      if (mode == "subsample") {
        std::vector<std::size_t> keep;
        for (const auto& p : parts) keep.push_back(detail::ParseCount(p));
        report = subsample_experiment(ds, keep, trials, seed, cfg);
      } else {
        std::vector<double> rates;
        for (const auto& p : parts) rates.push_back(detail::ParseDouble(p));
        report = error_injection_experiment(ds, rates, trials, seed, cfg);
      }
      WriteTextFile(out_path, WriteJson(RobustnessToJson(report, cfg)));
    } else if (simulate->parsed()) {
      SimConfig sim = load_network(net_path);
      if (sim_n) sim.n_per_variant = *sim_n;
      if (sim_seed) sim.seed = *sim_seed;
      if (sim_prompt) sim.prompt_id = *sim_prompt;
      write_dataset(out_path, sample_dataset(sim));
    } else if (validate->parsed()) {
      const auto pre = ReportSensitivitiesFromJson(ReadJsonFile(pre_path), pre_path);
      const auto post = ReportSensitivitiesFromJson(ReadJsonFile(post_path), post_path);
      WriteTextFile(out_path, WriteJson(CorrelationToJson(correlate_reports(pre, post))));
    } else if (compare->parsed()) {
      const auto ds = load_dataset(data_path);
      auto cfg = detail::LoadConfigOr(config_path, {});
      cfg.ideal = IdealSpec::MakeReference(load_dataset(reference_path));
      detail::WriteReportFiles(run_analysis(ds, cfg, "reference"), out_path, dot_path);
    } else if (mitigation->parsed()) {
      const auto ds = load_dataset(data_path);
      const auto cfg = detail::LoadConfigOr(config_path, {});
      std::map<std::string, ValidatedDataset> mitigated;
      for (const auto& spec : mitigated_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
          throw Error(ErrorKind::kInvalidArgument,
                      "--mitigated expects AXIS=FILE, got '" + spec + "'");
        }
        const std::string axis = spec.substr(0, eq);
        if (mitigated.count(axis)) {
          throw Error(ErrorKind::kInvalidArgument,
                      "axis '" + axis + "' mitigated twice");
        }
        mitigated.emplace(axis, load_dataset(spec.substr(eq + 1)));
      }
      WriteTextFile(out_path,
                    WriteJson(ReportToJson(run_mitigation_analysis(ds, mitigated, cfg))));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_io() ? kExitIo : kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace isaudit::cli

#endif  // ISAUDIT_CLI_HPP_
