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

#include "gcnsim/simulator.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace gcnsim {

enum class SweepParameter { SamplingFactor, AggBufferCapacity, ModuleGranularity };

std::string_view to_string(SweepParameter p);
/// "sampling_factor", "agg_buffer_capacity" or "module_granularity".
SweepParameter parse_sweep_parameter(std::string_view s);

struct SweepPoint {
  double value = 0.0;
  SimReport report;
};

struct SweepResult {
  SweepParameter parameter = SweepParameter::SamplingFactor;
  std::vector<SweepPoint> points;     // in input order, invalid values left out
  std::vector<std::string> warnings;  // one per skipped value
};

/// Applies one sweep value to copies of the base configs. Sampling factors
/// replace the sampling of every aggregation layer; capacities are bytes;
/// granularities are modules per group. Throws ConfigError on invalid values.
void apply_sweep_value(SweepParameter p, double value, ModelConfig& model, SystemConfig& sys);

/// Worker count: HYGCN_SIM_THREADS when set and positive, else the hardware
/// concurrency.
std::size_t sweep_threads();

/// One experiment per value, run in parallel on isolated simulator
/// instances. Oracle mismatches propagate.
SweepResult sweep(const CscGraph& graph, const ModelConfig& model, const SystemConfig& sys,
                  SweepParameter parameter, const std::vector<double>& values,
                  const ExperimentOptions& options = {}, std::size_t threads = 0);

/// value, cycles, DRAM bytes, ratios, latency and weight energy per point.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

}  // namespace gcnsim
