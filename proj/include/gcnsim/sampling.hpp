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
#include <span>
#include <vector>

namespace gcnsim {

/// splitmix64 finalizer; used to derive independent streams from one seed.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

/// Positions (indices into the in-neighbor list of v, ascending) kept by
/// `policy`. Uniform and fraction draws are a prefix of one seeded
/// permutation, so a smaller sample is always a subset of a larger one.
std::vector<uint32_t> sample_positions(std::size_t degree, const SamplingPolicy& policy,
                                       uint64_t seed, VertexId v);

/// The sampler: the subset of `edges` (in-neighbors of v) kept by `policy`.
std::vector<VertexId> sampler_filter(std::span<const VertexId> edges, const SamplingPolicy& policy,
                                     uint64_t seed, VertexId v);

/// Sampled neighborhoods S(v) in CSC layout.
struct SampleSet {
  std::vector<uint64_t> col_ptr{0};
  std::vector<VertexId> row_idx;

  std::size_t num_vertices() const { return col_ptr.size() - 1; }
  std::size_t num_edges() const { return row_idx.size(); }
  std::span<const VertexId> neighbors(VertexId v) const {
    return {row_idx.data() + col_ptr[v], row_idx.data() + col_ptr[v + 1]};
  }
};

SampleSet sample(const CscGraph& graph, const SamplingPolicy& policy, uint64_t seed);

/// Copy of `graph` restricted to the sampled edges (features kept).
CscGraph apply_sample(const CscGraph& graph, const SampleSet& sample);

}  // namespace gcnsim
