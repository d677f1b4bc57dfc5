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
#include "gcnsim/model_zoo.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gcnsim {

struct SystolicModule {
  std::size_t rows = 4;
  std::size_t cols = 128;
  std::size_t id = 0;
};

/// Output-stationary tiling: ceil(out/cols) x ceil(batch/rows) tiles, each
/// costing agg_len + rows + cols - 1 cycles (stream plus fill and drain).
uint64_t mvm_latency(const SystolicModule& module, std::size_t agg_len, std::size_t out_len,
                     std::size_t batch);

/// Module grouping. Each unit chains `group_size` modules vertically, so a
/// unit is a (group_size * rows) x cols array and one weight stream feeds
/// every module of the unit.
struct CombGranularity {
  std::size_t units = 8;
  std::size_t group_size = 1;
  SystolicModule unit;  // merged shape

  std::size_t batch_vertices() const { return unit.rows; }
};

/// Throws ConfigError unless `modules_per_group` divides the module count.
CombGranularity set_granularity(const SystemConfig& sys, std::size_t modules_per_group);

struct CombStats {
  uint64_t macs = 0;
  uint64_t busy_cycles = 0;  // summed over units
  uint64_t passes = 0;
  uint64_t weight_buffer_reads = 0;  // weight elements streamed out of the buffer
  uint64_t vertices = 0;

  CombStats& operator+=(const CombStats& o);
};

struct CombPass {
  std::size_t unit = 0;
  uint64_t start = 0;
  uint64_t end = 0;
};

/// Unit-level timing plus numerics of the MLP datapath.
class CombEngine {
 public:
  CombEngine(CombGranularity granularity);

  /// Schedules a batch of at most batch_vertices() vertices on the earliest
  /// free unit, no earlier than `ready`.
  CombPass dispatch(std::size_t batch, uint64_t ready, const std::vector<MlpShape>& shapes);
  /// MVM + bias + activation over a batch, computed tile by tile the way the
  /// arrays accumulate (one wide accumulator per PE, rounded once on drain).
  FeatureMatrix compute(const FeatureMatrix& inputs, const Mlp& mlp, Activation activation) const;
  /// Plain product a^T b through the same tiles (no bias, no activation).
  FeatureMatrix compute_tn(const FeatureMatrix& a, const FeatureMatrix& b) const;

  const CombGranularity& granularity() const { return g_; }
  const CombStats& stats() const { return stats_; }
  uint64_t all_idle_at() const;

 private:
  FeatureMatrix stage(const FeatureMatrix& x, const DenseLayer& layer, bool relu) const;

  CombGranularity g_;
  std::vector<uint64_t> unit_free_;
  CombStats stats_;
};

}  // namespace gcnsim
