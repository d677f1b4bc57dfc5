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

#include "gcnsim/fixed.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gcnsim {

using VertexId = uint32_t;
using Edge = std::pair<VertexId, VertexId>;  // (source, destination)

/// Compressed-sparse-column adjacency plus a per-vertex feature matrix.
///
/// Column v lists the sources u of every edge u -> v, strictly increasing.
/// Self loops are never materialized here; layers that aggregate over
/// N(v) + {v} add the self term themselves.
struct CscGraph {
  std::size_t num_vertices = 0;
  std::vector<uint64_t> col_ptr{0};
  std::vector<VertexId> row_idx;
  FeatureMatrix features;  // num_vertices x feature_len, row-major

  std::size_t num_edges() const { return row_idx.size(); }
  std::size_t feature_len() const { return static_cast<std::size_t>(features.cols()); }

  std::span<const VertexId> in_neighbors(VertexId v) const {
    return {row_idx.data() + col_ptr[v], row_idx.data() + col_ptr[v + 1]};
  }

  /// Throws DimensionError / ParseError when an invariant does not hold.
  void validate() const;
};

/// Builds a CSC graph; edges are sorted per column and deduplicated. With
/// `undirected`, every (u, v) also inserts (v, u). Features default to a
/// zero column so that feature_len >= 1 always holds.
CscGraph build_csc(std::size_t num_vertices, std::vector<Edge> edges, bool undirected = false);

/// In-degree of v: col_ptr[v+1] - col_ptr[v].
std::size_t degree(const CscGraph& graph, VertexId v);

/// Graph with every edge reversed; features are copied unchanged.
CscGraph transpose(const CscGraph& graph);

/// Relabels vertex v as perm[v] (edges and feature rows).
CscGraph permute(const CscGraph& graph, std::span<const VertexId> perm);

}  // namespace gcnsim
