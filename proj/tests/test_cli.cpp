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

#include "isaudit/cli.hpp"

#include <filesystem>
#include <sstream>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace isaudit {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("isaudit-cli-" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int Run(std::vector<std::string> args) {
    args.insert(args.begin(), "isaudit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return cli::RunCli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string Net(const std::string& name) {
    return (testing::DataDir() / "networks" / name).string();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, SimulateAnalyzeAndValidate) {
  ASSERT_EQ(Run({"simulate", "--net", Net("occupation_like.bcnet.json"), "--out",
                 Path("d.json")}),
            0)
      << err_.str();
  ASSERT_EQ(Run({"analyze", "--data", Path("d.json"), "--out", Path("r.json"),
                 "--dot", Path("g.dot")}),
            0)
      << err_.str();
  EXPECT_EQ(ReadJsonFile(Path("r.json"))["schema"], "bcreport-v1");
  EXPECT_EQ(ReadTextFile(Path("g.dot")).rfind("digraph", 0), 0u);
  ASSERT_EQ(Run({"validate", "--pre", Path("r.json"), "--post", Path("r.json"),
                 "--out", Path("c.json")}),
            0)
      << err_.str();
  EXPECT_NEAR(ReadJsonFile(Path("c.json"))["r"].get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, SimulateOverrides) {
  ASSERT_EQ(Run({"simulate", "--net", Net("binary_chain.bcnet.json"), "--out",
                 Path("d.json"), "--n", "5", "--seed", "3", "--prompt-id", "tiny"}),
            0);
  const auto ds = load_dataset(Path("d.json"));
  EXPECT_EQ(ds.prompt_id(), "tiny");
  EXPECT_EQ(ds.variants()[0].records.size(), 5u);
}

TEST_F(CliTest, AggregateUsesGlobalDefaults) {
  for (const char* seed : {"1", "2"}) {
    ASSERT_EQ(Run({"simulate", "--net", Net("planted_gender_age.bcnet.json"), "--out",
                   Path(std::string("d") + seed + ".json"), "--seed", seed,
                   "--prompt-id", std::string("p") + seed}),
              0);
  }
  ASSERT_EQ(Run({"aggregate", "--data", Path("d1.json"), Path("d2.json"), "--out",
                 Path("g.json")}),
            0)
      << err_.str();
  const auto j = ReadJsonFile(Path("g.json"));
  EXPECT_EQ(j["scope"], "global");
  EXPECT_EQ(j["config"]["p_value_threshold"].get<double>(), 5e-5);
  EXPECT_EQ(j["config"]["min_abs_is"].get<double>(), 0.03);
  EXPECT_EQ(j["provenance"].size(), 2u);
}

TEST_F(CliTest, RobustnessModes) {
  ASSERT_EQ(Run({"simulate", "--net", Net("planted_gender_age.bcnet.json"), "--out",
                 Path("d.json")}),
            0);
  ASSERT_EQ(Run({"robustness", "--data", Path("d.json"), "--mode", "subsample",
                 "--levels", "40,48", "--trials", "2", "--seed", "4", "--out",
                 Path("s.json")}),
            0)
      << err_.str();
  const auto s = ReadJsonFile(Path("s.json"));
  EXPECT_EQ(s["mode"], "subsample");
  EXPECT_EQ(s["levels"][1]["level"], 48);
  EXPECT_EQ(s["levels"][1]["mean_edge_diff"].get<double>(), 0.0);
  ASSERT_EQ(Run({"robustness", "--data", Path("d.json"), "--mode", "vqa-error",
                 "--levels", "0,0.1", "--trials", "2", "--out", Path("v.json")}),
            0)
      << err_.str();
  const auto v = ReadJsonFile(Path("v.json"));
  EXPECT_EQ(v["levels"][0]["per_trial"][0]["flips"], 0);
}

TEST_F(CliTest, CompareReferenceAndMitigation) {
  ASSERT_EQ(Run({"simulate", "--net", Net("planted_gender_age.bcnet.json"), "--out",
                 Path("d.json")}),
            0);
  ASSERT_EQ(Run({"simulate", "--net", Net("planted_gender_age.bcnet.json"), "--out",
                 Path("ref.json"), "--seed", "77", "--prompt-id", "world"}),
            0);
  ASSERT_EQ(Run({"compare-reference", "--data", Path("d.json"), "--reference",
                 Path("ref.json"), "--out", Path("r.json")}),
            0)
      << err_.str();
  const auto r = ReadJsonFile(Path("r.json"));
  EXPECT_EQ(r["scope"], "reference");
  EXPECT_EQ(r["config"]["ideal"]["prompt_id"], "world");
  EXPECT_TRUE(r["summary"]["amplification_index"].is_number());

  ASSERT_EQ(Run({"mitigation", "--data", Path("d.json"), "--mitigated",
                 "gender=" + Path("ref.json"), "--out", Path("m.json")}),
            0)
      << err_.str();
  EXPECT_EQ(ReadJsonFile(Path("m.json"))["scope"], "mitigation");
  EXPECT_EQ(Run({"mitigation", "--data", Path("d.json"), "--mitigated", "gender",
                 "--out", Path("m.json")}),
            1);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Run({"--help"}), 0);
  EXPECT_EQ(Run({}), 1);
  EXPECT_EQ(Run({"analyze", "--data", Path("d.json")}), 1);
  EXPECT_EQ(Run({"frobnicate"}), 1);
  // Missing input file.
  EXPECT_EQ(Run({"analyze", "--data", Path("missing.json"), "--out", Path("r.json")}),
            2);
  // Unwritable output.
  ASSERT_EQ(Run({"simulate", "--net", Net("binary_chain.bcnet.json"), "--out",
                 Path("d.json")}),
            0);
  EXPECT_EQ(Run({"analyze", "--data", Path("d.json"), "--out",
                 Path("no/such/dir/r.json")}),
            2);
  // Malformed and invalid inputs.
  WriteTextFile(Path("bad.json"), "{\"schema\": ");
  EXPECT_EQ(Run({"analyze", "--data", Path("bad.json"), "--out", Path("r.json")}), 1);
  EXPECT_NE(err_.str().find("ParseError"), std::string::npos);
  WriteTextFile(Path("old.json"), "{\"schema\": \"bcattr-v0\"}");
  EXPECT_EQ(Run({"analyze", "--data", Path("old.json"), "--out", Path("r.json")}), 1);
  EXPECT_EQ(Run({"robustness", "--data", Path("d.json"), "--mode", "subsample",
                 "--levels", "100000", "--out", Path("s.json")}),
            1);
  EXPECT_EQ(Run({"robustness", "--data", Path("d.json"), "--mode", "vqa-error",
                 "--levels", "abc", "--out", Path("s.json")}),
            1);
  EXPECT_EQ(Run({"robustness", "--data", Path("d.json"), "--mode", "other",
                 "--levels", "1", "--out", Path("s.json")}),
            1);
}

}  // namespace
}  // namespace isaudit
