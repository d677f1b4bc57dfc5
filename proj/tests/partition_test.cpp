/*
 * Copyright 2026 The gcnsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "gcnsim/error.hpp"
#include "gcnsim/partition.hpp"
#include "gcnsim/sampling.hpp"
#include "plan_oracle.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

namespace gcnsim {
namespace {

using testing::random_graph;

TEST(PlanDimensions, FromBufferCapacities) {
  SystemConfig sys;
  EXPECT_EQ(plan_dimensions(sys, 16, 1024).interval_width, 2048u);
  EXPECT_EQ(plan_dimensions(sys, 1433, 16).window_height, 11u);
  EXPECT_THROW(plan_dimensions(sys, 16385, 16), ConfigError);
  EXPECT_THROW(plan_dimensions(sys, 16, (8u << 20) / 4 + 1), ConfigError);
  EXPECT_EQ(plan_dimensions(sys, 16384, 16).window_height, 1u);
}

TEST(EffectualInterval, SlidesThenShrinks) {
  const CscGraph g = build_csc(8, {{2, 0}, {5, 3}});
  auto [shard, next] = get_one_effectual_interval(g, {0, 4}, 0, 2);
  ASSERT_TRUE(shard);
  EXPECT_EQ(shard->row_start, 2u);
  EXPECT_EQ(shard->row_end, 2u);
  EXPECT_EQ(next, 4u);
  auto [second, after] = get_one_effectual_interval(g, {0, 4}, next, 2);
  ASSERT_TRUE(second);
  EXPECT_EQ(second->row_start, 5u);
  EXPECT_EQ(after, 7u);
  EXPECT_FALSE(get_one_effectual_interval(g, {0, 4}, after, 2).first);
}

TEST(EffectualInterval, DenseColumnNeedsNoSlidingOrShrinking) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < 6; ++u) edges.emplace_back(u, 0);
  const CscGraph g = build_csc(6, edges);
  auto [shard, next] = get_one_effectual_interval(g, {0, 1}, 0, 3);
  ASSERT_TRUE(shard);
  EXPECT_EQ(shard->row_start, 0u);
  EXPECT_EQ(shard->row_end, 2u);
  EXPECT_EQ(shard->edge_count, 3u);
  EXPECT_EQ(next, 3u);
}

TEST(EffectualInterval, NoEdgesGivesNothing) {
  const CscGraph g = build_csc(6, {{1, 5}});
  EXPECT_FALSE(get_one_effectual_interval(g, {0, 4}, 0, 2).first);
}

TEST(BuildPlan, EliminationLoadsFewerRowsOnSparseGrid) {
  const CscGraph g = random_graph(16, 0.1, 1, 4);
  const auto on = build_plan(g, {4, 4}, 0, true);
  const auto off = build_plan(g, {4, 4}, 0, false);
  const auto brute = testing::brute_force_plan(g, 4, 4);
  std::size_t brute_rows = 0;
  for (const auto& list : brute) {
    for (const auto& s : list) brute_rows += s.rows();
  }
  EXPECT_EQ(on.rows_loaded(), brute_rows);
  EXPECT_LT(on.rows_loaded(), off.rows_loaded());
}

TEST(BuildPlan, CompleteBlockIsUnchangedByElimination) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < 8; ++u) {
    for (VertexId v = 0; v < 8; ++v) edges.emplace_back(u, v);
  }
  const CscGraph g = build_csc(8, edges);
  EXPECT_EQ(build_plan(g, {4, 4}, 0, true).shards, build_plan(g, {4, 4}, 0, false).shards);
}

TEST(BuildPlan, EmptyGraphHasNoShards) {
  const CscGraph g = build_csc(10, {});
  for (bool elim : {true, false}) {
    const auto plan = build_plan(g, {4, 4}, 0, elim);
    EXPECT_EQ(plan.intervals.size(), 3u);
    EXPECT_EQ(plan.num_shards(), 0u);
  }
}

TEST(BuildPlan, TrafficEstimate) {
  PartitionPlan plan;
  plan.shards = {{EffectualShard{{0, 4}, 2, 2, 1}}};
  EXPECT_EQ(plan_traffic_estimate(plan, 8), 32u);
}

TEST(BuildPlan, MatchesBruteForceOnSmallGraphs) {
  for (uint64_t seed = 1; seed <= 200; ++seed) {
    auto rng = testing::rng_for(seed);
    const std::size_t n = 1 + rng() % 64;
    const double p = std::uniform_real_distribution<double>(0.0, 0.4)(rng);
    const std::size_t width = 1 + rng() % n;
    const std::size_t height = 1 + rng() % n;
    const CscGraph g = random_graph(n, p, 1, seed);
    EXPECT_EQ(build_plan(g, {width, height}, 0, true).shards,
              testing::brute_force_plan(g, width, height))
        << "n=" << n << " p=" << p << " width=" << width << " height=" << height;
  }
}

void check_invariants(const CscGraph& g, const PartitionPlan& plan) {
  std::map<Edge, int> seen;
  for (std::size_t i = 0; i < plan.intervals.size(); ++i) {
    const Interval target = plan.intervals[i];
    const RowOccupancy occ(g, target);
    for (const auto& s : plan.shards[i]) {
      ASSERT_EQ(s.target, target);
      ASSERT_LE(s.row_start, s.row_end);
      if (plan.edge_capacity > 0) ASSERT_LE(s.edge_count, plan.edge_capacity);
      if (plan.sparsity_elimination) {
        ASSERT_GE(occ.edges_in(s.row_start, s.row_start), 1u);
        ASSERT_GE(occ.edges_in(s.row_end, s.row_end), 1u);
        ASSERT_LE(s.rows(), plan.window_height);
      }
      const auto edges = shard_edges(g, s);
      ASSERT_EQ(edges.size(), s.edge_count);
      for (const auto& e : edges) ++seen[e];
    }
  }
  ASSERT_EQ(seen.size(), g.num_edges());
  for (VertexId v = 0; v < g.num_vertices; ++v) {
    for (VertexId u : g.in_neighbors(v)) ASSERT_EQ(seen[Edge(u, v)], 1);
  }
}

TEST(BuildPlan, ConservationTightnessAndDominance) {
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    auto rng = testing::rng_for(seed + 1000);
    const std::size_t n = 2 + rng() % 200;
    const double p = std::uniform_real_distribution<double>(0.0, 0.2)(rng);
    const CscGraph g = random_graph(n, p, 1, seed);
    const PlanDimensions dims{1 + rng() % 64, 1 + rng() % 32};
    const std::size_t capacity = rng() % 2 ? 0 : 1 + rng() % 40;
    const auto on = build_plan(g, dims, capacity, true);
    const auto off = build_plan(g, dims, capacity, false);
    check_invariants(g, on);
    check_invariants(g, off);
    for (std::size_t i = 0; i < on.intervals.size(); ++i) {
      std::size_t rows_on = 0, rows_off = 0;
      for (const auto& s : on.shards[i]) rows_on += s.rows();
      for (const auto& s : off.shards[i]) rows_off += s.rows();
      EXPECT_LE(rows_on, rows_off) << "seed " << seed << " interval " << i;
    }
    EXPECT_LE(plan_traffic_estimate(on, 16), plan_traffic_estimate(off, 16));
  }
}

TEST(BuildPlan, SamplingIncreasesEliminatedRows) {
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    const CscGraph g = random_graph(256, 0.08, 1, seed);
    long long prev = -1;
    for (double f : {1.0, 2.0, 4.0, 8.0}) {
      const CscGraph s = apply_sample(g, sample(g, SamplingPolicy::fraction(f), seed));
      const auto on = build_plan(s, {64, 16}, 0, true);
      const auto off = build_plan(s, {64, 16}, 0, false);
      const long long eliminated =
          static_cast<long long>(off.rows_loaded()) - static_cast<long long>(on.rows_loaded());
      EXPECT_GE(eliminated, prev) << "seed " << seed << " factor " << f;
      prev = eliminated;
    }
  }
}

TEST(BuildPlan, OversizedWindowsSplitWithinCapacity) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < 10; ++u) {
    for (VertexId v = 0; v < 4; ++v) edges.emplace_back(u, v);
  }
  const CscGraph g = build_csc(10, edges);
  const auto plan = build_plan(g, {4, 10}, 8, true);
  EXPECT_EQ(plan.num_shards(), 5u);
  check_invariants(g, plan);
}

TEST(BuildPlan, CsvDump) {
  const CscGraph g = build_csc(4, {{2, 0}});
  std::ostringstream out;
  write_plan_csv(out, build_plan(g, {4, 2}, 0, true));
  EXPECT_EQ(out.str(), "interval_start,interval_end,row_start,row_end,edge_count\n0,4,2,2,1\n");
}

}  // namespace
}  // namespace gcnsim
