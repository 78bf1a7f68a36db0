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

#include "isaudit/robustness.hpp"

#include <boost/math/distributions/binomial.hpp>

#include "gtest/gtest.h"
#include "isaudit/io.hpp"
#include "isaudit/simulator.hpp"
#include "test_util.hpp"

namespace isaudit {
namespace {

ValidatedDataset Simulated(std::uint64_t seed) {
  auto cfg = load_network(testing::DataDir() / "networks" /
                          "occupation_like.bcnet.json");
  cfg.seed = seed;
  return validate_dataset(sample_dataset(cfg));
}

GraphEdge Edge(std::string from, std::string to, std::optional<double> is) {
  GraphEdge e;
  e.from = std::move(from);
  e.to = std::move(to);
  e.is = is;
  return e;
}

TEST(TrialSeed, MixesLevelAndTrial) {
  EXPECT_EQ(TrialSeed(42, 0, 0), DeriveSeed(42, 0));
  EXPECT_EQ(TrialSeed(42, 1, 3), DeriveSeed(42, (std::uint64_t{1} << 32) | 3));
  EXPECT_NE(TrialSeed(42, 1, 0), TrialSeed(42, 0, 1));
}

TEST(CompareGraphs, CountsSymmetricDifferenceAndShift) {
  PairwiseCausalGraph full;
  full.edges = {Edge("a", "b", 0.2), Edge("a", "c", -0.1), Edge("b", "c", 0.4)};
  PairwiseCausalGraph other;
  other.edges = {Edge("a", "b", 0.3), Edge("a", "c", -0.1), Edge("c", "a", 0.5)};
  const auto c = compare_graphs(full, other);
  EXPECT_EQ(c.edge_diff, 2u);
  EXPECT_EQ(c.common_edges, 2u);
  EXPECT_NEAR(c.is_shift_pct, 100.0 * (0.5 + 0.0) / 2, 1e-9);
  EXPECT_NEAR(c.abs_is_shift, 0.05, 1e-12);
}

TEST(CompareGraphs, IdenticalGraphs) {
  PairwiseCausalGraph full;
  full.edges = {Edge("a", "b", 0.2)};
  const auto c = compare_graphs(full, full);
  EXPECT_EQ(c.edge_diff, 0u);
  EXPECT_EQ(c.is_shift_pct, 0.0);
}

TEST(CompareGraphs, LostSignalCountsAsFullShift) {
  PairwiseCausalGraph full;
  full.edges = {Edge("a", "b", 0.2), Edge("a", "c", -0.4)};
  const auto c = compare_graphs(full, PairwiseCausalGraph{});
  EXPECT_EQ(c.edge_diff, 2u);
  EXPECT_EQ(c.common_edges, 0u);
  EXPECT_EQ(c.is_shift_pct, 100.0);
  EXPECT_NEAR(c.abs_is_shift, 0.3, 1e-12);
  EXPECT_EQ(compare_graphs(PairwiseCausalGraph{}, full).is_shift_pct, 0.0);
}

TEST(CompareGraphs, DenominatorFloor) {
  PairwiseCausalGraph full;
  full.edges = {Edge("a", "b", 0.0)};
  PairwiseCausalGraph other;
  other.edges = {Edge("a", "b", 1e-10)};
  EXPECT_NEAR(compare_graphs(full, other).is_shift_pct, 10.0, 1e-6);
}

TEST(Subsample, KeepsRequestedCountPerVariantInOrder) {
  const auto ds = Simulated(1);
  Rng rng(5);
  const auto sub = subsample_dataset(ds, 10, rng);
  ASSERT_EQ(sub.variants.size(), ds.variants().size());
  for (std::size_t v = 0; v < sub.variants.size(); ++v) {
    const auto& kept = sub.variants[v].records;
    ASSERT_EQ(kept.size(), 10u);
    for (std::size_t i = 1; i < kept.size(); ++i)
      EXPECT_LT(kept[i - 1].image_id, kept[i].image_id);
  }
  EXPECT_NO_THROW(validate_dataset(sub));
}

TEST(Subsample, Errors) {
  const auto ds = Simulated(1);
  Rng rng(5);
  try {
    subsample_dataset(ds, 49, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kKeepCountTooLarge);
  }
  EXPECT_THROW(subsample_dataset(ds, 0, rng), Error);
  const std::vector<std::size_t> too_many{49};
  EXPECT_THROW(subsample_experiment(ds, too_many, 1, 0, {}), Error);
}

TEST(Subsample, FullKeepIsIdentity) {
  const auto ds = Simulated(2);
  const std::vector<std::size_t> keep{48};
  const auto report = subsample_experiment(ds, keep, 5, 11, {});
  ASSERT_EQ(report.levels.size(), 1u);
  for (const auto& t : report.levels[0].per_trial) {
    EXPECT_EQ(t.edge_diff, 0u);
    EXPECT_EQ(t.is_shift_pct, 0.0);
  }
}

TEST(Subsample, StarvationLosesMostEdges) {
  const auto ds = Simulated(2);
  const std::vector<std::size_t> keep{1};
  const auto report = subsample_experiment(ds, keep, 5, 11, {});
  ASSERT_GT(report.full_edge_count, 0u);
  EXPECT_GE(report.levels[0].mean_edge_diff,
            0.8 * static_cast<double>(report.full_edge_count));
}

TEST(Subsample, ReportIsReproducible) {
  const auto ds = Simulated(3);
  const std::vector<std::size_t> keep{16, 32};
  const auto a = subsample_experiment(ds, keep, 4, 9, {});
  const auto b = subsample_experiment(ds, keep, 4, 9, {});
  ASSERT_EQ(a.levels.size(), 2u);
  for (std::size_t l = 0; l < 2; ++l) {
    EXPECT_EQ(a.levels[l].level, static_cast<double>(keep[l]));
    EXPECT_EQ(a.levels[l].trials, 4u);
    for (std::size_t t = 0; t < 4; ++t) {
      EXPECT_EQ(a.levels[l].per_trial[t].seed, TrialSeed(9, l, t));
      EXPECT_EQ(a.levels[l].per_trial[t].edge_diff, b.levels[l].per_trial[t].edge_diff);
      EXPECT_EQ(a.levels[l].per_trial[t].is_shift_pct,
                b.levels[l].per_trial[t].is_shift_pct);
    }
  }
}

TEST(Injection, ZeroRateIsNoOp) {
  const auto ds = Simulated(4);
  Rng rng(1);
  const auto out = inject_answer_errors(ds, 0.0, rng);
  EXPECT_EQ(out.flips, 0u);
  EXPECT_EQ(validate_dataset(out.data), ds);
  const std::vector<double> rates{0.0};
  const auto report = error_injection_experiment(ds, rates, 3, 0, {});
  for (const auto& t : report.levels[0].per_trial) EXPECT_EQ(t.edge_diff, 0u);
}

TEST(Injection, FlipsAlwaysChangeToAnotherValidAttribute) {
  const auto ds = Simulated(4);
  Rng rng(2);
  const auto out = inject_answer_errors(ds, 1.0, rng);
  EXPECT_EQ(out.flips, out.answers);
  for (std::size_t v = 0; v < out.data.variants.size(); ++v) {
    const auto& before = ds.variants()[v].records;
    const auto& after = out.data.variants[v].records;
    for (std::size_t i = 0; i < before.size(); ++i) {
      for (const auto& axis : ds.axes()) {
        const auto& a = after[i].attributes.at(axis.name);
        EXPECT_NE(a, before[i].attributes.at(axis.name));
        EXPECT_TRUE(axis.index_of(a).has_value());
      }
    }
  }
}

TEST(Injection, FlipCountWithinBinomialInterval) {
  const auto ds = Simulated(5);
  const std::vector<double> rates{0.05};
  const auto report = error_injection_experiment(ds, rates, 20, 3, {});
  for (const auto& t : report.levels[0].per_trial) {
    const boost::math::binomial_distribution<double> dist(
        static_cast<double>(t.answers), 0.05);
    EXPECT_GE(static_cast<double>(t.flips), boost::math::quantile(dist, 0.005));
    EXPECT_LE(static_cast<double>(t.flips), boost::math::quantile(dist, 0.995));
  }
}

TEST(Injection, RejectsBadRates) {
  const auto ds = Simulated(5);
  Rng rng(0);
  EXPECT_THROW(inject_answer_errors(ds, 1.5, rng), Error);
  const std::vector<double> rates{-0.1};
  EXPECT_THROW(error_injection_experiment(ds, rates, 1, 0, {}), Error);
}

}  // namespace
}  // namespace isaudit
