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

#include "gcnsim/pipeline.hpp"

#include "gcnsim/error.hpp"

#include <algorithm>

namespace gcnsim {

PipelineSequencer::PipelineSequencer(PipelineMode mode, std::size_t batch_vertices)
    : mode_(mode), batch_(batch_vertices) {
  if (batch_ == 0) throw ConfigError("combination batch size must be >= 1");
}

std::vector<CombBatch> PipelineSequencer::release(uint64_t cycle, bool partial) {
  std::vector<CombBatch> out;
  std::size_t at = 0;
  while (pending_.size() - at >= batch_ || (partial && at < pending_.size())) {
    const std::size_t take = std::min(batch_, pending_.size() - at);
    out.push_back({{pending_.begin() + at, pending_.begin() + at + take}, cycle});
    at += take;
  }
  pending_.erase(pending_.begin(), pending_.begin() + at);
  return out;
}

std::vector<CombBatch> PipelineSequencer::on_finalized(VertexId v, uint64_t cycle) {
  if (mode_ == PipelineMode::None) return {};
  pending_.push_back(v);
  latest_ = std::max(latest_, cycle);
  if (mode_ == PipelineMode::Energy) return {};
  return release(latest_, false);
}

std::vector<CombBatch> PipelineSequencer::on_interval_end(uint64_t cycle) {
  if (mode_ == PipelineMode::None) return {};
  latest_ = std::max(latest_, cycle);
  return release(latest_, true);
}

}  // namespace gcnsim
