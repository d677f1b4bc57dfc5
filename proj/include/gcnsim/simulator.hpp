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
#include "gcnsim/memory.hpp"
#include "gcnsim/report.hpp"

#include <optional>
#include <vector>

namespace gcnsim {

struct ExperimentOptions {
  uint64_t seed = 1;
  bool record_trace = false;
  bool check_oracle = true;
};

struct SimResult {
  SimReport report;
  std::vector<FeatureMatrix> layer_outputs;
  FeatureMatrix output;                    // final features
  std::optional<FeatureMatrix> adjacency;  // pooled adjacency, pooling models only
  std::vector<TraceRecord> trace;
};

/// Runs every layer through the timing model while computing the numerics
/// from the engines' own datapaths. With check_oracle, the outputs are
/// compared with the functional reference and OracleMismatch names the
/// first differing (vertex, element).
SimResult run_experiment(const CscGraph& graph, const ModelConfig& model, const SystemConfig& sys,
                         const ExperimentOptions& options = {});

}  // namespace gcnsim
