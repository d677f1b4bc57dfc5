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
#include "gcnsim/fixed.hpp"
#include "gcnsim/graph.hpp"
#include "gcnsim/partition.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace gcnsim {

/// Off-chip access classes in priority order.
enum class RequestClass : uint8_t { Edge = 0, Input = 1, Weight = 2, Output = 3 };
inline constexpr std::size_t kNumRequestClasses = 4;

std::string_view to_string(RequestClass cls);
constexpr int priority_rank(RequestClass cls) { return static_cast<int>(cls); }

struct MemoryRequest {
  RequestClass cls = RequestClass::Edge;
  uint64_t address = 0;
  uint64_t size = 0;
  uint64_t issue_cycle = 0;
  uint64_t batch_id = 0;
  uint64_t seq = 0;            // arrival order within issue_cycle
  bool intermediate = false;   // a_v spilled by the non-pipelined mode
};

/// Issue order. Enabled: batch by batch, each batch sorted by priority then
/// address (stable). Disabled: arrival order.
std::vector<MemoryRequest> coordinate_requests(std::vector<MemoryRequest> pending, bool enabled);

struct DramAddress {
  uint64_t channel = 0;
  uint64_t bank = 0;
  uint64_t row = 0;
  uint64_t column = 0;
  friend bool operator==(const DramAddress&, const DramAddress&) = default;
};

/// Low-order interleaving at row-buffer granularity: consecutive row-sized
/// blocks rotate over channels, then banks. Throws ConfigError unless the
/// geometry is a power of two.
DramAddress remap_address(uint64_t addr, const SystemConfig& sys);

// Address regions, each far larger than any desk-scale footprint.
inline constexpr uint64_t kEdgeRegion = 0x0;
inline constexpr std::array<uint64_t, 2> kFeatureRegion{0x4000'0000, 0x8000'0000};
inline constexpr uint64_t kWeightRegion = 0xC000'0000;
inline constexpr uint64_t kIntermediateRegion = 0x1'0000'0000;

/// Ping-pong image of the aggregation buffer. Each chunk holds the partial
/// aggregates of one target interval in wide accumulators, so streamed
/// shard-by-shard accumulation matches one-shot aggregation bit for bit.
class AggBufferImage {
 public:
  enum class ChunkState { Idle, Filling, Draining };

  AggBufferImage(std::size_t interval_width, std::size_t agg_len);

  /// Claims an idle chunk for `interval`. Throws SimulationError if no chunk
  /// is idle or another chunk is still filling.
  int begin_fill(Interval interval, AggregateFn fn);
  /// Adds one term. `coefficient` scales sum-type terms before accumulation.
  void apply(int chunk, VertexId v, const Fixed32* values, std::optional<Fixed32> coefficient);
  /// Final a_v; readable by the combination side from `cycle` on.
  FixedRow finalize(int chunk, VertexId v, uint64_t cycle);
  /// Throws SimulationError unless v was finalized at or before `cycle`.
  FixedRow read(int chunk, VertexId v, uint64_t cycle) const;
  void begin_drain(int chunk);
  void release(int chunk);

  ChunkState state(int chunk) const { return chunks_[chunk].state; }
  const Interval& interval(int chunk) const { return chunks_[chunk].interval; }

 private:
  struct Chunk {
    ChunkState state = ChunkState::Idle;
    Interval interval;
    AggregateFn fn = AggregateFn::Add;
    std::vector<int64_t> acc;
    std::vector<uint32_t> count;
    std::vector<FixedRow> result;
    std::vector<std::optional<uint64_t>> finalized_at;
  };
  const Chunk& checked(int chunk, VertexId v) const;
  Chunk& checked(int chunk, VertexId v);

  std::size_t width_;
  std::size_t agg_len_;
  std::array<Chunk, 2> chunks_;
};

}  // namespace gcnsim
