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

#include "gcnsim/agg_engine.hpp"
#include "gcnsim/comb_engine.hpp"
#include "gcnsim/config.hpp"
#include "gcnsim/memory.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gcnsim {

inline constexpr int kReportSchemaVersion = 1;

struct LatencySummary {
  uint64_t count = 0;
  double mean = 0.0;
  uint64_t p50 = 0;
  uint64_t p99 = 0;
  uint64_t max = 0;
};

/// Nearest-rank percentiles.
LatencySummary summarize_latencies(std::vector<uint64_t> latencies);

struct PhaseTiming {
  std::string name;
  uint64_t start = 0;
  uint64_t end = 0;
};

struct SimReport {
  ModelConfig model;
  uint64_t seed = 0;
  SystemConfig sys;
  std::size_t num_vertices = 0;
  std::size_t num_edges = 0;
  std::size_t feature_len = 0;

  uint64_t total_cycles = 0;
  AggStats agg;
  CombStats comb;
  DramStats dram;
  EnergyLedger energy;
  std::vector<uint64_t> vertex_latencies;
  std::vector<PhaseTiming> phases;

  double utilization() const;
  double hit_rate() const { return dram.hit_rate(); }
  /// 1 - rows loaded / rows of the non-eliminated grid.
  double eliminated_ratio() const;
  /// rows loaded / rows of the non-eliminated grid.
  double residual_sparsity() const;
  LatencySummary latency() const { return summarize_latencies(vertex_latencies); }
};

/// Canonical JSON (fixed key order, so equal runs give equal bytes).
std::string report_json(const SimReport& report);
/// class,bytes rows plus intermediate and per-channel lines.
void write_traffic_csv(std::ostream& out, const SimReport& report);
/// Power-of-two latency buckets: bucket_lo,bucket_hi,count.
void write_latency_hist_csv(std::ostream& out, const SimReport& report);
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

/// report.json, traffic.csv, latency_hist.csv and, when non-empty,
/// trace.csv.
void write_report_dir(const std::filesystem::path& dir, const SimReport& report,
                      const std::vector<TraceRecord>& trace = {});

}  // namespace gcnsim
