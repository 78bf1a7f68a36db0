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

#include "isaudit/io.hpp"

#include <cmath>
#include <filesystem>

#include "gtest/gtest.h"
#include "isaudit/report.hpp"
#include "isaudit/simulator.hpp"
#include "test_util.hpp"

namespace isaudit {
namespace {

namespace fs = std::filesystem;
using testing::Cf;
using testing::DatasetBuilder;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("isaudit-io-" + std::to_string(::testing::UnitTest::GetInstance()
                                                ->random_seed()) +
             "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

ErrorKind KindOf(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::kUnknownAxis;
}

ValidatedDataset Simulated(std::uint64_t seed) {
  auto cfg = load_network(testing::DataDir() / "networks" /
                          "occupation_like.bcnet.json");
  cfg.seed = seed;
  return validate_dataset(sample_dataset(cfg));
}

TEST(Json, RealsUseSeventeenDigits) {
  EXPECT_EQ(FormatReal(0.1), "0.10000000000000001");
  EXPECT_EQ(FormatReal(1.0), "1");
  Json j = Json::object();
  j["x"] = 1.0 / 3;
  j["n"] = 3;
  j["s"] = "a\"b";
  const auto text = WriteJson(j);
  EXPECT_EQ(text, "{\n  \"x\": 0.33333333333333331,\n  \"n\": 3,\n  \"s\": \"a\\\"b\"\n}\n");
  EXPECT_EQ(ParseJsonText(text, "t")["x"].get<double>(), 1.0 / 3);
}

TEST(Json, ParseErrorReportsPosition) {
  try {
    ParseJsonText("{\n  \"a\": [1, 2,\n", "file.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParseError);
    EXPECT_NE(std::string(e.what()).find("file.json:"), std::string::npos);
  }
}

TEST(Dataset, RoundTripIsIdentity) {
  TempDir dir;
  auto b = DatasetBuilder("doctor");
  b.Axis("gender", {"male", "female"})
      .Axis("age", {"young", "middle", "old"}, MetricKind::kOrdinal);
  b.AddCounts(VariantKey::Init(), "age", {3, 2, 1}, {{"gender", "female"}});
  b.Add(VariantKey::Init(), {}, 1, false);
  b.AddCounts(Cf("gender", "male"), "age", {1, 2, 3});
  b.AddCounts(Cf("gender", "female"), "age", {2, 2, 2});
  const auto ds = b.Validate();
  write_dataset(dir / "d.json", ds.data());
  const auto back = load_dataset(dir / "d.json");
  EXPECT_EQ(back, ds);
  EXPECT_EQ(back.variants().size(), 3u);

  const auto sim = Simulated(1);
  write_dataset(dir / "s.json", sim.data());
  EXPECT_EQ(load_dataset(dir / "s.json"), sim);
}

TEST(Dataset, RejectsWrongSchemaTag) {
  TempDir dir;
  Json j = DatasetToJson(Simulated(1).data());
  j["schema"] = "bcattr-v0";
  WriteTextFile(dir / "old.json", WriteJson(j));
  EXPECT_EQ(KindOf([&] { load_dataset(dir / "old.json"); }),
            ErrorKind::kSchemaVersionError);
}

TEST(Dataset, RejectsTruncatedFile) {
  TempDir dir;
  const auto text = WriteJson(DatasetToJson(Simulated(1).data()));
  WriteTextFile(dir / "cut.json", text.substr(0, text.size() / 2));
  EXPECT_EQ(KindOf([&] { load_dataset(dir / "cut.json"); }),
            ErrorKind::kParseError);
}

TEST(Dataset, MissingFileIsIoError) {
  EXPECT_EQ(KindOf([&] { load_dataset("/nonexistent/dir/data.json"); }),
            ErrorKind::kIoError);
}

TEST(Dataset, ValidationErrorsPropagate) {
  TempDir dir;
  Json j = DatasetToJson(Simulated(1).data());
  j["variants"][0]["records"][0]["attributes"]["gender"] = "robot";
  WriteTextFile(dir / "bad.json", WriteJson(j));
  EXPECT_EQ(KindOf([&] { load_dataset(dir / "bad.json"); }),
            ErrorKind::kUnknownAttribute);
}

TEST(Network, RoundTrip) {
  const auto cfg = load_network(testing::DataDir() / "networks" /
                                "occupation_like.bcnet.json");
  const auto again = NetworkFromJson(NetworkToJson(cfg));
  EXPECT_EQ(again.network, cfg.network);
  EXPECT_EQ(again.n_per_variant, cfg.n_per_variant);
  EXPECT_EQ(again.seed, cfg.seed);
  EXPECT_EQ(again.prompt_id, cfg.prompt_id);
}

TEST(Config, ParsesAllKeys) {
  TempDir dir;
  auto b = DatasetBuilder("world");
  b.Axis("gender", {"male", "female"});
  b.AddCounts(VariantKey::Init(), "gender", {30, 18});
  write_dataset(dir / "ref.json", b.Build());
  WriteTextFile(dir / "cfg.json", R"({
    "p_value_threshold": 0.001,
    "min_abs_is": 0.02,
    "normalize_support": true,
    "intervention_pooling": "pool",
    "ideal": {"mode": "reference", "dataset": "ref.json"}
  })");
  const auto cfg = load_config(dir / "cfg.json");
  EXPECT_EQ(cfg.p_value_threshold, 0.001);
  EXPECT_EQ(cfg.min_abs_is, 0.02);
  EXPECT_TRUE(cfg.normalize_support);
  EXPECT_EQ(cfg.pooling, InterventionPooling::kPool);
  const auto& ref = std::get<IdealSpec::Reference>(cfg.ideal.mode);
  EXPECT_EQ(ref.dataset->prompt_id(), "world");
  EXPECT_EQ(ConfigToJson(cfg)["ideal"]["prompt_id"], "world");

  const auto exp = ConfigFromJson(ParseJsonText(
      R"({"ideal": {"mode": "explicit", "distributions": {"gender": [0.4, 0.6]}}})",
      "x"));
  const auto& e = std::get<IdealSpec::Explicit>(exp.ideal.mode);
  EXPECT_EQ(e.dists.at("gender").probs, (std::vector<double>{0.4, 0.6}));
  EXPECT_EQ(exp.p_value_threshold, 1e-4);

  EXPECT_EQ(KindOf([] {
              ConfigFromJson(ParseJsonText(R"({"intervention_pooling": "sum"})", "x"));
            }),
            ErrorKind::kParseError);
  EXPECT_THROW(ConfigFromJson(ParseJsonText(R"({"p_value_threshold": 2})", "x")),
               Error);
}

GraphEdge Edge(std::string from, std::string to, std::optional<double> is) {
  GraphEdge e;
  e.from = std::move(from);
  e.to = std::move(to);
  e.is = is;
  return e;
}

TEST(Dot, NegativeEdgesAreDashed) {
  const auto dot = RenderDot("doctor", {"gender", "age"},
                             {Edge("gender", "age", -0.12)});
  EXPECT_NE(dot.find("  \"gender\" -> \"age\" [label=\"-0.120\", style=dashed];\n"),
            std::string::npos);
}

TEST(Dot, EmptyGraphListsAllNodes) {
  EXPECT_EQ(RenderDot("p", {"gender", "age", "emotion"}, {}),
            "digraph \"p\" {\n  \"age\";\n  \"emotion\";\n  \"gender\";\n}\n");
}

TEST(Dot, SortedAndFormatted) {
  const auto dot = RenderDot("p", {"b", "a"},
                             {Edge("b", "a", 0.1234), Edge("a", "b", std::nullopt)});
  EXPECT_EQ(dot,
            "digraph \"p\" {\n  \"a\";\n  \"b\";\n"
            "  \"a\" -> \"b\" [label=\"n/a\"];\n"
            "  \"b\" -> \"a\" [label=\"0.123\"];\n}\n");
  EXPECT_EQ(RenderDot("q\"x", {}, {}), "digraph \"q\\\"x\" {\n}\n");
}

TEST(Report, RenderIsDeterministic) {
  const auto ds = Simulated(2);
  const auto a = render_outputs(run_analysis(ds, {}));
  const auto b = render_outputs(run_analysis(ds, {}));
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.dot, b.dot);
  const auto graph = discover_graph(ds, {});
  const auto m = all_pair_sensitivities(ds, {});
  EXPECT_EQ(render_outputs(graph, m, {}).dot, render_outputs(graph, m, {}).dot);
}

TEST(Report, SensitivityIdentityHoldsAfterSerialization) {
  const auto ds = Simulated(3);
  const Json j = ParseJsonText(WriteJson(ReportToJson(run_analysis(ds, {}))), "r");
  EXPECT_EQ(j["schema"], "bcreport-v1");
  ASSERT_FALSE(j["edges"].empty());
  for (const char* key : {"edges", "matrix"}) {
    for (const auto& e : j[key]) {
      if (e["is"].is_null()) continue;
      EXPECT_EQ(e["is"].get<double>(),
                e["w_init"].get<double>() - e["w_post"].get<double>());
    }
  }
  std::string prev;
  for (const auto& e : j["edges"]) {
    const std::string k = e["from"].get<std::string>() + "\x01" +
                          e["to"].get<std::string>();
    EXPECT_LT(prev, k);
    prev = k;
  }
}

TEST(Report, SensitivitiesReadBack) {
  const auto report = run_analysis(Simulated(3), {});
  const auto s = ReportSensitivitiesFromJson(ReportToJson(report));
  EXPECT_EQ(s.edges.size(), report.edges.size());
  EXPECT_EQ(s.matrix.size(), report.matrix.size());
  for (const auto& e : report.edges) EXPECT_EQ(s.edges.at({e.from, e.to}), *e.is);
  Json bad = ReportToJson(report);
  bad["schema"] = "bcreport-v0";
  EXPECT_THROW(ReportSensitivitiesFromJson(bad), Error);
}

ReportSensitivities Values(const std::vector<double>& v) {
  ReportSensitivities s;
  for (std::size_t i = 0; i < v.size(); ++i)
    s.edges[{"a" + std::to_string(i), "b"}] = v[i];
  return s;
}

TEST(Correlation, HandValues) {
  EXPECT_NEAR(correlate_reports(Values({1, 2, 3, 4}), Values({3, 5, 7, 9})).r, 1.0,
              1e-12);
  EXPECT_NEAR(correlate_reports(Values({1, 2, 3, 4}), Values({2, 0, -2, -4})).r,
              -1.0, 1e-12);
  EXPECT_NEAR(correlate_reports(Values({1, 2, 3, 4}), Values({1, 3, 2, 4})).r,
              0.8, 1e-12);
}

TEST(Correlation, FallsBackToPostMatrix) {
  ReportSensitivities pre = Values({0.1, 0.2, 0.3});
  ReportSensitivities post;
  post.edges[{"a0", "b"}] = 0.5;
  post.matrix[{"a1", "b"}] = 0.7;
  post.matrix[{"a2", "b"}] = 0.9;
  post.matrix[{"a0", "b"}] = -5.0;
  const auto c = correlate_reports(pre, post);
  EXPECT_EQ(c.post, (std::vector<double>{0.5, 0.7, 0.9}));
  EXPECT_NEAR(c.r, 1.0, 1e-12);
  const Json j = CorrelationToJson(c);
  EXPECT_EQ(j["schema"], "bccorr-v1");
  EXPECT_EQ(j["n"], 3);
}

}  // namespace
}  // namespace isaudit
