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

#pragma once

#include "gcnsim/config.hpp"
#include "gcnsim/graph.hpp"

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace gcnsim {

/// Half-open range of vertex ids.
struct Interval {
  VertexId start = 0;
  VertexId end = 0;

  std::size_t size() const { return end - start; }
  bool contains(VertexId v) const { return v >= start && v < end; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Source rows [row_start, row_end] (inclusive) of one target interval.
struct EffectualShard {
  Interval target;
  VertexId row_start = 0;
  VertexId row_end = 0;
  std::size_t edge_count = 0;

  std::size_t rows() const { return row_end - row_start + 1; }
  friend bool operator==(const EffectualShard&, const EffectualShard&) = default;
};

struct PlanDimensions {
  std::size_t interval_width = 1;
  std::size_t window_height = 1;
};

/// Interval width from half the aggregation buffer, window height from half
/// the input buffer, 4 bytes per element. Throws ConfigError when a single
/// vector does not fit in half a buffer.
PlanDimensions plan_dimensions(const SystemConfig& sys, std::size_t feature_len,
                               std::size_t agg_len);

/// Sorted source rows with edges into one target interval, with edge counts.
class RowOccupancy {
 public:
  RowOccupancy(const CscGraph& graph, Interval target);

  bool empty() const { return rows_.empty(); }
  /// First occupied row >= row, if any.
  std::optional<VertexId> first_at_or_after(VertexId row) const;
  /// Last occupied row <= row, if any.
  std::optional<VertexId> last_at_or_before(VertexId row) const;
  /// Edges whose source lies in [lo, hi].
  std::size_t edges_in(VertexId lo, VertexId hi) const;
  /// Occupied rows in [lo, hi] with their edge counts.
  std::vector<std::pair<VertexId, std::size_t>> rows_in(VertexId lo, VertexId hi) const;

 private:
  std::vector<VertexId> rows_;
  std::vector<std::size_t> prefix_;  // prefix_[i] = edges in rows_[0..i)
};

/// One sliding + shrinking step. Returns the shard (or nullopt once no edge
/// remains at or below row_pos) and the next row position, which is the
/// bottom of the window before shrinking plus one.
std::pair<std::optional<EffectualShard>, VertexId> get_one_effectual_interval(
    const CscGraph& graph, Interval target, VertexId row_pos, std::size_t window_height);
std::pair<std::optional<EffectualShard>, VertexId> get_one_effectual_interval(
    const RowOccupancy& occupancy, std::size_t num_vertices, Interval target, VertexId row_pos,
    std::size_t window_height);

struct PartitionPlan {
  std::size_t interval_width = 1;
  std::size_t window_height = 1;
  std::size_t edge_capacity = 0;  // edges per half edge buffer
  bool sparsity_elimination = true;
  std::vector<Interval> intervals;
  std::vector<std::vector<EffectualShard>> shards;  // per interval

  std::size_t num_shards() const;
  std::size_t num_edges() const;
  /// Source rows loaded into the input buffer over the whole plan.
  std::size_t rows_loaded() const;
};

/// Core planner. With elimination off, windows are the fixed grid of
/// window_height rows, keeping non-empty ones. Windows holding more than
/// edge_capacity edges are split by source rows.
PartitionPlan build_plan(const CscGraph& graph, PlanDimensions dims, std::size_t edge_capacity,
                         bool sparsity_elimination);

/// Dimensions and edge capacity derived from `sys`. `edge_bytes` defaults to
/// sys.edge_record_bytes.
PartitionPlan build_plan(const CscGraph& graph, const SystemConfig& sys, std::size_t feature_len,
                         std::size_t agg_len, bool sparsity_elimination,
                         std::size_t edge_bytes = 0);

/// Input-buffer fill traffic: rows loaded x feature_len x 4 bytes.
uint64_t plan_traffic_estimate(const PartitionPlan& plan, std::size_t feature_len);

/// Edges of a shard in processing order: by target, then by source.
std::vector<Edge> shard_edges(const CscGraph& graph, const EffectualShard& shard);

/// CSV: interval_start,interval_end,row_start,row_end,edge_count.
void write_plan_csv(std::ostream& out, const PartitionPlan& plan);

}  // namespace gcnsim
