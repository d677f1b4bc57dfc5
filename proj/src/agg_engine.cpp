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

#include "gcnsim/agg_engine.hpp"

#include <algorithm>
#include <queue>

namespace gcnsim {

AggTask schedule_shard(const std::vector<Edge>& edges, std::size_t feature_len,
                       const SimdPool& pool, bool record, bool vertex_concentrated) {
  AggTask task;
  const uint64_t lanes = pool.total_lanes();
  task.element_ops = uint64_t{edges.size()} * feature_len;
  if (edges.empty() || feature_len == 0) return task;

  if (vertex_concentrated) {
    // Runs of edges per target; each run goes to the least-loaded core.
    using Load = std::pair<uint64_t, std::size_t>;
    std::priority_queue<Load, std::vector<Load>, std::greater<>> cores;
    for (std::size_t c = 0; c < pool.cores; ++c) cores.push({0, c});
    uint64_t finish = 0;
    for (std::size_t i = 0; i < edges.size();) {
      std::size_t j = i;
      while (j < edges.size() && edges[j].second == edges[i].second) ++j;
      auto [load, core] = cores.top();
      cores.pop();
      load += ((j - i) * feature_len + pool.lanes_per_core - 1) / pool.lanes_per_core;
      finish = std::max(finish, load);
      cores.push({load, core});
      i = j;
    }
    task.cycles = finish;
    return task;
  }

  task.cycles = (task.element_ops + lanes - 1) / lanes;
  if (!record) return task;
  task.per_cycle.resize(task.cycles);
  uint64_t cycle = 0;
  uint32_t lane = 0;
  for (uint32_t e = 0; e < edges.size(); ++e) {
    uint32_t elem = 0;
    while (elem < feature_len) {
      const auto take = static_cast<uint32_t>(std::min<uint64_t>(feature_len - elem, lanes - lane));
      task.per_cycle[cycle].push_back({e, edges[e].second, lane, elem, elem + take});
      elem += take;
      lane += take;
      if (lane == lanes) {
        lane = 0;
        ++cycle;
      }
    }
  }
  return task;
}

uint64_t finalize_cycles(AggregateFn fn, std::size_t agg_len, const SimdPool& pool) {
  if (fn != AggregateFn::Mean) return 0;
  return (agg_len + pool.total_lanes() - 1) / pool.total_lanes();
}

AggStats& AggStats::operator+=(const AggStats& o) {
  compute_cycles += o.compute_cycles;
  stall_edge_wait += o.stall_edge_wait;
  stall_feature_wait += o.stall_feature_wait;
  stall_output_backpressure += o.stall_output_backpressure;
  edge_bytes += o.edge_bytes;
  input_bytes += o.input_bytes;
  element_ops += o.element_ops;
  shards += o.shards;
  rows_loaded += o.rows_loaded;
  rows_grid += o.rows_grid;
  return *this;
}

ShardRequests shard_requests(const CscGraph& graph, const std::vector<Edge>& sampled_edges,
                             const EffectualShard& shard, std::size_t feature_len,
                             uint64_t feature_base, std::size_t edge_bytes) {
  ShardRequests out;
  for (VertexId v = shard.target.start; v < shard.target.end; ++v) {
    const auto nb = graph.in_neighbors(v);
    const auto lo = std::lower_bound(nb.begin(), nb.end(), shard.row_start);
    const auto hi = std::upper_bound(lo, nb.end(), shard.row_end);
    if (lo == hi) continue;
    const uint64_t first = graph.col_ptr[v] + static_cast<uint64_t>(lo - nb.begin());
    MemoryRequest req;
    req.cls = RequestClass::Edge;
    req.address = kEdgeRegion + first * edge_bytes;
    req.size = static_cast<uint64_t>(hi - lo) * edge_bytes;
    out.edges.push_back(req);
  }

  const uint64_t row_bytes = uint64_t{feature_len} * 4;
  std::vector<bool> seen(shard.rows(), false);
  auto push_row = [&](VertexId u) {
    if (seen[u - shard.row_start]) return;
    seen[u - shard.row_start] = true;
    MemoryRequest req;
    req.cls = RequestClass::Input;
    req.address = feature_base + uint64_t{u} * row_bytes;
    req.size = row_bytes;
    out.inputs.push_back(req);
  };
  for (const auto& [u, v] : sampled_edges) push_row(u);
  for (VertexId u = shard.row_start; u <= shard.row_end; ++u) push_row(u);
  return out;
}

}  // namespace gcnsim
