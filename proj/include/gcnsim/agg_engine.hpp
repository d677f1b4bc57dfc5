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
#include "gcnsim/coordinator.hpp"
#include "gcnsim/graph.hpp"
#include "gcnsim/partition.hpp"
#include "gcnsim/sampling.hpp"

#include <cstdint>
#include <vector>

namespace gcnsim {

struct SimdPool {
  std::size_t cores = 32;
  std::size_t lanes_per_core = 16;

  explicit SimdPool(const SystemConfig& sys) : cores(sys.simd_cores), lanes_per_core(sys.simd_width) {}
  SimdPool(std::size_t c, std::size_t l) : cores(c), lanes_per_core(l) {}
  std::size_t total_lanes() const { return cores * lanes_per_core; }
};

/// Elements [elem_begin, elem_end) of edge `edge` (index into the shard's
/// edge list), processed on lanes [lane_begin, lane_begin + width) in one
/// cycle.
struct LaneSlice {
  uint32_t edge;
  VertexId target;
  uint32_t lane_begin;
  uint32_t elem_begin;
  uint32_t elem_end;
};

struct AggTask {
  uint64_t cycles = 0;
  uint64_t element_ops = 0;
  std::vector<std::vector<LaneSlice>> per_cycle;  // filled only when recorded
};

/// Vertex-disperse packing: the element work of consecutive edges fills all
/// lanes cycle by cycle, spilling into the next edge (and target) whenever a
/// cycle has lanes left. With `vertex_concentrated`, each target vertex is
/// instead bound to one core and cores run their vertices back to back.
AggTask schedule_shard(const std::vector<Edge>& edges, std::size_t feature_len,
                       const SimdPool& pool, bool record = false,
                       bool vertex_concentrated = false);

/// Extra cycles to finish one vertex (Mean's divide).
uint64_t finalize_cycles(AggregateFn fn, std::size_t agg_len, const SimdPool& pool);

struct AggStats {
  uint64_t compute_cycles = 0;
  uint64_t stall_edge_wait = 0;
  uint64_t stall_feature_wait = 0;
  uint64_t stall_output_backpressure = 0;
  uint64_t edge_bytes = 0;
  uint64_t input_bytes = 0;
  uint64_t element_ops = 0;
  uint64_t shards = 0;
  uint64_t rows_loaded = 0;
  uint64_t rows_grid = 0;  // rows the elimination-off grid would load

  uint64_t eliminated_rows() const { return rows_grid > rows_loaded ? rows_grid - rows_loaded : 0; }
  AggStats& operator+=(const AggStats& o);
};

/// Off-chip requests of one shard.
struct ShardRequests {
  std::vector<MemoryRequest> edges;   // one per target column with fetched edges
  std::vector<MemoryRequest> inputs;  // one per source row, in discovery order
};

/// Edge records are fetched from the unsampled edge array (the sampler runs
/// on chip); feature rows [row_start, row_end] come from `feature_base`.
/// Input requests follow the order in which the eliminator meets sources:
/// column by column, first occurrence first, then the remaining rows.
ShardRequests shard_requests(const CscGraph& graph, const std::vector<Edge>& sampled_edges,
                             const EffectualShard& shard, std::size_t feature_len,
                             uint64_t feature_base, std::size_t edge_bytes);

}  // namespace gcnsim
