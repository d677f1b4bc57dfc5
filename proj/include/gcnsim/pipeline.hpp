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

#include <cstdint>
#include <vector>

namespace gcnsim {

/// Vertices handed to the combination engine together, available from
/// `ready`.
struct CombBatch {
  std::vector<VertexId> vertices;
  uint64_t ready = 0;
};

/// Dispatch decisions between the engines.
///   latency: a batch leaves as soon as one group's worth of vertices is
///            final; the rest is flushed when the interval ends.
///   energy:  the whole interval is held and released in full batches when
///            the interval ends.
///   none:    nothing is dispatched during aggregation.
class PipelineSequencer {
 public:
  PipelineSequencer(PipelineMode mode, std::size_t batch_vertices);

  std::vector<CombBatch> on_finalized(VertexId v, uint64_t cycle);
  std::vector<CombBatch> on_interval_end(uint64_t cycle);

  PipelineMode mode() const { return mode_; }

 private:
  std::vector<CombBatch> release(uint64_t cycle, bool partial);

  PipelineMode mode_;
  std::size_t batch_;
  std::vector<VertexId> pending_;
  uint64_t latest_ = 0;
};

}  // namespace gcnsim
