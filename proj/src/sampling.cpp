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

#include "gcnsim/sampling.hpp"

#include "gcnsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace gcnsim {

namespace {

// Unbiased draw in [0, bound) by rejection; std distributions are not
// portable across standard libraries.
uint64_t bounded(std::mt19937_64& rng, uint64_t bound) {
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % bound;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

std::vector<uint32_t> random_prefix(std::size_t degree, std::size_t keep, uint64_t seed,
                                    VertexId v) {
  std::vector<uint32_t> pos(degree);
  std::iota(pos.begin(), pos.end(), 0u);
  std::mt19937_64 rng(mix_seed(seed, v));
  for (std::size_t i = 0; i < keep; ++i) {
    const auto j = i + bounded(rng, degree - i);
    std::swap(pos[i], pos[j]);
  }
  pos.resize(keep);
  std::sort(pos.begin(), pos.end());
  return pos;
}

}  // namespace

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<uint32_t> sample_positions(std::size_t degree, const SamplingPolicy& policy,
                                       uint64_t seed, VertexId v) {
  using Kind = SamplingPolicy::Kind;
  switch (policy.kind) {
    case Kind::None: {
      std::vector<uint32_t> all(degree);
      std::iota(all.begin(), all.end(), 0u);
      return all;
    }
    case Kind::Uniform:
      if (policy.k < 1) throw ConfigError("uniform sampling requires k >= 1");
      return random_prefix(degree, std::min(policy.k, degree), seed, v);
    case Kind::Fraction: {
      const auto keep = static_cast<std::size_t>(std::ceil(static_cast<double>(degree) / policy.factor));
      return random_prefix(degree, std::min(keep, degree), seed, v);
    }
    case Kind::Predefined: {
      if (!policy.predefined || v >= policy.predefined->size()) return {};
      std::vector<uint32_t> pos = (*policy.predefined)[v];
      for (uint32_t p : pos) {
        if (p >= degree) {
          throw ConfigError("predefined sample index " + std::to_string(p) + " for vertex " +
                            std::to_string(v) + " exceeds degree " + std::to_string(degree));
        }
      }
      std::sort(pos.begin(), pos.end());
      pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
      return pos;
    }
  }
  return {};
}

std::vector<VertexId> sampler_filter(std::span<const VertexId> edges, const SamplingPolicy& policy,
                                     uint64_t seed, VertexId v) {
  if (policy.kind == SamplingPolicy::Kind::None) return {edges.begin(), edges.end()};
  std::vector<VertexId> kept;
  for (uint32_t p : sample_positions(edges.size(), policy, seed, v)) kept.push_back(edges[p]);
  return kept;
}

SampleSet sample(const CscGraph& graph, const SamplingPolicy& policy, uint64_t seed) {
  SampleSet s;
  s.col_ptr.reserve(graph.num_vertices + 1);
  for (VertexId v = 0; v < graph.num_vertices; ++v) {
    auto kept = sampler_filter(graph.in_neighbors(v), policy, seed, v);
    s.row_idx.insert(s.row_idx.end(), kept.begin(), kept.end());
    s.col_ptr.push_back(s.row_idx.size());
  }
  return s;
}

CscGraph apply_sample(const CscGraph& graph, const SampleSet& sample) {
  if (sample.num_vertices() != graph.num_vertices) {
    throw DimensionError("sample set does not match graph size");
  }
  CscGraph g;
  g.num_vertices = graph.num_vertices;
  g.col_ptr = sample.col_ptr;
  g.row_idx = sample.row_idx;
  g.features = graph.features;
  return g;
}

}  // namespace gcnsim
