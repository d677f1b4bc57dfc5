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

#include "gcnsim/partition.hpp"

#include "gcnsim/error.hpp"

#include <algorithm>
#include <ostream>
#include <string>

namespace gcnsim {

namespace {

constexpr std::size_t kElementBytes = 4;

// Splits rows [lo, hi] so that no piece holds more than `capacity` edges.
// Tight pieces start and end on occupied rows; otherwise the pieces tile
// [lo, hi] exactly.
void emit_split(const RowOccupancy& occ, Interval target, VertexId lo, VertexId hi,
                std::size_t capacity, bool tight, std::vector<EffectualShard>& out) {
  const std::size_t total = occ.edges_in(lo, hi);
  if (total == 0) return;
  if (capacity == 0 || total <= capacity) {
    out.push_back({target, lo, hi, total});
    return;
  }
  const auto rows = occ.rows_in(lo, hi);
  EffectualShard cur{target, tight ? rows.front().first : lo, 0, 0};
  VertexId last_row = cur.row_start;
  for (const auto& [row, count] : rows) {
    if (cur.edge_count > 0 && cur.edge_count + count > capacity) {
      cur.row_end = tight ? last_row : row - 1;
      out.push_back(cur);
      cur = {target, row, 0, 0};
    }
    cur.edge_count += count;
    last_row = row;
  }
  cur.row_end = tight ? last_row : hi;
  out.push_back(cur);
}

}  // namespace

PlanDimensions plan_dimensions(const SystemConfig& sys, std::size_t feature_len,
                               std::size_t agg_len) {
  if (feature_len == 0 || agg_len == 0) throw ConfigError("feature lengths must be >= 1");
  const std::size_t input_half = sys.input_buffer_bytes / 2;
  const std::size_t agg_half = sys.agg_buffer_bytes / 2;
  if (feature_len * kElementBytes > input_half) {
    throw ConfigError("a " + std::to_string(feature_len) +
                      "-element feature vector does not fit in half of the " +
                      std::to_string(sys.input_buffer_bytes) + "-byte input buffer");
  }
  if (agg_len * kElementBytes > agg_half) {
    throw ConfigError("a " + std::to_string(agg_len) +
                      "-element aggregation vector does not fit in half of the " +
                      std::to_string(sys.agg_buffer_bytes) + "-byte aggregation buffer");
  }
  return {std::max<std::size_t>(1, agg_half / (agg_len * kElementBytes)),
          std::max<std::size_t>(1, input_half / (feature_len * kElementBytes))};
}

RowOccupancy::RowOccupancy(const CscGraph& graph, Interval target) {
  std::vector<VertexId> all;
  for (VertexId v = target.start; v < target.end; ++v) {
    const auto nb = graph.in_neighbors(v);
    all.insert(all.end(), nb.begin(), nb.end());
  }
  std::sort(all.begin(), all.end());
  prefix_.push_back(0);
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    rows_.push_back(all[i]);
    prefix_.push_back(prefix_.back() + (j - i));
    i = j;
  }
}

std::optional<VertexId> RowOccupancy::first_at_or_after(VertexId row) const {
  auto it = std::lower_bound(rows_.begin(), rows_.end(), row);
  if (it == rows_.end()) return std::nullopt;
  return *it;
}

std::optional<VertexId> RowOccupancy::last_at_or_before(VertexId row) const {
  auto it = std::upper_bound(rows_.begin(), rows_.end(), row);
  if (it == rows_.begin()) return std::nullopt;
  return *std::prev(it);
}

std::size_t RowOccupancy::edges_in(VertexId lo, VertexId hi) const {
  if (hi < lo) return 0;
  const auto a = std::lower_bound(rows_.begin(), rows_.end(), lo) - rows_.begin();
  const auto b = std::upper_bound(rows_.begin(), rows_.end(), hi) - rows_.begin();
  return prefix_[b] - prefix_[a];
}

std::vector<std::pair<VertexId, std::size_t>> RowOccupancy::rows_in(VertexId lo,
                                                                    VertexId hi) const {
  std::vector<std::pair<VertexId, std::size_t>> out;
  if (hi < lo) return out;
  auto a = std::lower_bound(rows_.begin(), rows_.end(), lo) - rows_.begin();
  const auto b = std::upper_bound(rows_.begin(), rows_.end(), hi) - rows_.begin();
  for (; a < b; ++a) out.emplace_back(rows_[a], prefix_[a + 1] - prefix_[a]);
  return out;
}

std::pair<std::optional<EffectualShard>, VertexId> get_one_effectual_interval(
    const RowOccupancy& occupancy, std::size_t num_vertices, Interval target, VertexId row_pos,
    std::size_t window_height) {
  if (num_vertices == 0 || row_pos >= num_vertices) return {std::nullopt, row_pos};
  // Window sliding: move the top down to the first row with an edge.
  const auto top = occupancy.first_at_or_after(row_pos);
  if (!top) return {std::nullopt, static_cast<VertexId>(num_vertices)};
  const auto tentative = static_cast<VertexId>(
      std::min<std::size_t>(std::size_t{*top} + window_height - 1, num_vertices - 1));
  // Window shrinking: move the bottom up to the last row with an edge.
  const VertexId bottom = *occupancy.last_at_or_before(tentative);
  EffectualShard shard{target, *top, bottom, occupancy.edges_in(*top, bottom)};
  return {shard, tentative + 1};
}

std::pair<std::optional<EffectualShard>, VertexId> get_one_effectual_interval(
    const CscGraph& graph, Interval target, VertexId row_pos, std::size_t window_height) {
  return get_one_effectual_interval(RowOccupancy(graph, target), graph.num_vertices, target,
                                    row_pos, window_height);
}

std::size_t PartitionPlan::num_shards() const {
  std::size_t n = 0;
  for (const auto& s : shards) n += s.size();
  return n;
}

std::size_t PartitionPlan::num_edges() const {
  std::size_t n = 0;
  for (const auto& list : shards) {
    for (const auto& s : list) n += s.edge_count;
  }
  return n;
}

std::size_t PartitionPlan::rows_loaded() const {
  std::size_t n = 0;
  for (const auto& list : shards) {
    for (const auto& s : list) n += s.rows();
  }
  return n;
}

PartitionPlan build_plan(const CscGraph& graph, PlanDimensions dims, std::size_t edge_capacity,
                         bool sparsity_elimination) {
  PartitionPlan plan;
  plan.window_height = std::max<std::size_t>(1, dims.window_height);
  plan.interval_width = std::max<std::size_t>(1, dims.interval_width);
  // A single source row contributes at most interval_width edges, so this
  // keeps every row-level split feasible.
  if (edge_capacity > 0) plan.interval_width = std::min(plan.interval_width, edge_capacity);
  plan.edge_capacity = edge_capacity;
  plan.sparsity_elimination = sparsity_elimination;

  const std::size_t n = graph.num_vertices;
  for (std::size_t start = 0; start < n; start += plan.interval_width) {
    const Interval target{static_cast<VertexId>(start),
                          static_cast<VertexId>(std::min(n, start + plan.interval_width))};
    plan.intervals.push_back(target);
    auto& list = plan.shards.emplace_back();
    const RowOccupancy occ(graph, target);
    if (occ.empty()) continue;

    if (sparsity_elimination) {
      VertexId row_pos = 0;
      while (true) {
        auto [shard, next] = get_one_effectual_interval(occ, n, target, row_pos, plan.window_height);
        if (!shard) break;
        emit_split(occ, target, shard->row_start, shard->row_end, edge_capacity, true, list);
        row_pos = next;
      }
    } else {
      for (std::size_t top = 0; top < n; top += plan.window_height) {
        const auto bottom = std::min(n, top + plan.window_height) - 1;
        emit_split(occ, target, static_cast<VertexId>(top), static_cast<VertexId>(bottom),
                   edge_capacity, false, list);
      }
    }
  }
  return plan;
}

PartitionPlan build_plan(const CscGraph& graph, const SystemConfig& sys, std::size_t feature_len,
                         std::size_t agg_len, bool sparsity_elimination, std::size_t edge_bytes) {
  if (edge_bytes == 0) edge_bytes = sys.edge_record_bytes;
  const std::size_t capacity = std::max<std::size_t>(1, sys.edge_buffer_bytes / 2 / edge_bytes);
  return build_plan(graph, plan_dimensions(sys, feature_len, agg_len), capacity,
                    sparsity_elimination);
}

uint64_t plan_traffic_estimate(const PartitionPlan& plan, std::size_t feature_len) {
  return uint64_t{plan.rows_loaded()} * feature_len * kElementBytes;
}

std::vector<Edge> shard_edges(const CscGraph& graph, const EffectualShard& shard) {
  std::vector<Edge> edges;
  edges.reserve(shard.edge_count);
  for (VertexId v = shard.target.start; v < shard.target.end; ++v) {
    const auto nb = graph.in_neighbors(v);
    auto it = std::lower_bound(nb.begin(), nb.end(), shard.row_start);
    for (; it != nb.end() && *it <= shard.row_end; ++it) edges.emplace_back(*it, v);
  }
  return edges;
}

void write_plan_csv(std::ostream& out, const PartitionPlan& plan) {
  out << "interval_start,interval_end,row_start,row_end,edge_count\n";
  for (const auto& list : plan.shards) {
    for (const auto& s : list) {
      out << s.target.start << ',' << s.target.end << ',' << s.row_start << ',' << s.row_end << ','
          << s.edge_count << '\n';
    }
  }
}

}  // namespace gcnsim
