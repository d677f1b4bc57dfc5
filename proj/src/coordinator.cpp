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

#include "gcnsim/coordinator.hpp"

#include "gcnsim/error.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <tuple>
#include <utility>

namespace gcnsim {

std::string_view to_string(RequestClass cls) {
  switch (cls) {
    case RequestClass::Edge: return "edge";
    case RequestClass::Input: return "input";
    case RequestClass::Weight: return "weight";
    case RequestClass::Output: return "output";
  }
  return "?";
}

std::vector<MemoryRequest> coordinate_requests(std::vector<MemoryRequest> pending, bool enabled) {
  if (enabled) {
    std::stable_sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
      return std::tuple(a.batch_id, priority_rank(a.cls), a.address) <
             std::tuple(b.batch_id, priority_rank(b.cls), b.address);
    });
  } else {
    std::stable_sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
      return std::tuple(a.issue_cycle, a.seq) < std::tuple(b.issue_cycle, b.seq);
    });
  }
  return pending;
}

DramAddress remap_address(uint64_t addr, const SystemConfig& sys) {
  const uint64_t channels = sys.dram_channels;
  const uint64_t banks = sys.dram_banks;
  const uint64_t row_bytes = sys.row_buffer_bytes;
  if (!std::has_single_bit(channels) || !std::has_single_bit(banks) ||
      !std::has_single_bit(row_bytes)) {
    throw ConfigError("memory geometry must be powers of two");
  }
  const uint64_t block = addr / row_bytes;
  return {block % channels, (block / channels) % banks, block / (channels * banks),
          addr % row_bytes};
}

AggBufferImage::AggBufferImage(std::size_t interval_width, std::size_t agg_len)
    : width_(interval_width), agg_len_(agg_len) {}

int AggBufferImage::begin_fill(Interval interval, AggregateFn fn) {
  if (interval.size() > width_) {
    throw SimulationError("interval of " + std::to_string(interval.size()) +
                          " vertices exceeds the aggregation buffer chunk");
  }
  int chosen = -1;
  for (int c = 0; c < 2; ++c) {
    if (chunks_[c].state == ChunkState::Filling) {
      throw SimulationError("aggregation buffer already has a filling chunk");
    }
    if (chosen < 0 && chunks_[c].state == ChunkState::Idle) chosen = c;
  }
  if (chosen < 0) throw SimulationError("no idle aggregation buffer chunk");
  Chunk& ch = chunks_[chosen];
  const std::size_t n = interval.size();
  ch.state = ChunkState::Filling;
  ch.interval = interval;
  ch.fn = fn;
  ch.acc.assign(n * agg_len_, 0);
  ch.count.assign(n, 0);
  ch.result.assign(n, FixedRow());
  ch.finalized_at.assign(n, std::nullopt);
  return chosen;
}

const AggBufferImage::Chunk& AggBufferImage::checked(int chunk, VertexId v) const {
  const Chunk& ch = chunks_.at(static_cast<std::size_t>(chunk));
  if (ch.state == ChunkState::Idle || !ch.interval.contains(v)) {
    throw SimulationError("vertex " + std::to_string(v) + " is not resident in chunk " +
                          std::to_string(chunk));
  }
  return ch;
}

AggBufferImage::Chunk& AggBufferImage::checked(int chunk, VertexId v) {
  return const_cast<Chunk&>(std::as_const(*this).checked(chunk, v));
}

void AggBufferImage::apply(int chunk, VertexId v, const Fixed32* values,
                           std::optional<Fixed32> coefficient) {
  Chunk& ch = checked(chunk, v);
  const std::size_t local = v - ch.interval.start;
  if (ch.finalized_at[local]) throw SimulationError("term applied to a finalized vertex");
  int64_t* acc = ch.acc.data() + local * agg_len_;
  const bool first = ch.count[local]++ == 0;
  switch (ch.fn) {
    case AggregateFn::Max:
      for (std::size_t k = 0; k < agg_len_; ++k) {
        if (first || values[k].raw() > acc[k]) acc[k] = values[k].raw();
      }
      break;
    case AggregateFn::Min:
      for (std::size_t k = 0; k < agg_len_; ++k) {
        if (first || values[k].raw() < acc[k]) acc[k] = values[k].raw();
      }
      break;
    case AggregateFn::Add:
    case AggregateFn::Mean:
    case AggregateFn::WeightedAdd:
      if (coefficient) {
        for (std::size_t k = 0; k < agg_len_; ++k) acc[k] += (*coefficient * values[k]).raw();
      } else {
        for (std::size_t k = 0; k < agg_len_; ++k) acc[k] += values[k].raw();
      }
      break;
  }
}

FixedRow AggBufferImage::finalize(int chunk, VertexId v, uint64_t cycle) {
  Chunk& ch = checked(chunk, v);
  const std::size_t local = v - ch.interval.start;
  if (ch.finalized_at[local]) throw SimulationError("vertex finalized twice");
  const int64_t* acc = ch.acc.data() + local * agg_len_;
  FixedRow out = FixedRow::Zero(static_cast<Eigen::Index>(agg_len_));
  const uint32_t count = ch.count[local];
  for (std::size_t k = 0; count > 0 && k < agg_len_; ++k) {
    out(k) = ch.fn == AggregateFn::Mean ? divide_raw(acc[k], count) : Fixed32::saturate(acc[k]);
  }
  ch.result[local] = out;
  ch.finalized_at[local] = cycle;
  return out;
}

FixedRow AggBufferImage::read(int chunk, VertexId v, uint64_t cycle) const {
  const Chunk& ch = checked(chunk, v);
  const std::size_t local = v - ch.interval.start;
  if (!ch.finalized_at[local] || *ch.finalized_at[local] > cycle) {
    throw SimulationError("combination read vertex " + std::to_string(v) +
                          " before its aggregation finished");
  }
  return ch.result[local];
}

void AggBufferImage::begin_drain(int chunk) {
  Chunk& ch = chunks_.at(static_cast<std::size_t>(chunk));
  if (ch.state != ChunkState::Filling) throw SimulationError("drain of a chunk that is not filling");
  ch.state = ChunkState::Draining;
}

void AggBufferImage::release(int chunk) {
  Chunk& ch = chunks_.at(static_cast<std::size_t>(chunk));
  if (ch.state == ChunkState::Idle) throw SimulationError("release of an idle chunk");
  ch.state = ChunkState::Idle;
}

}  // namespace gcnsim
