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

#include "gcnsim/graph.hpp"

#include "gcnsim/error.hpp"

#include <algorithm>
#include <string>

namespace gcnsim {

void CscGraph::validate() const {
  if (col_ptr.size() != num_vertices + 1) {
    throw DimensionError("col_ptr has " + std::to_string(col_ptr.size()) + " entries, expected " +
                         std::to_string(num_vertices + 1));
  }
  if (col_ptr.front() != 0 || col_ptr.back() != row_idx.size()) {
    throw DimensionError("col_ptr does not span the edge array");
  }
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (col_ptr[v] > col_ptr[v + 1]) throw DimensionError("col_ptr is not non-decreasing");
    for (uint64_t e = col_ptr[v]; e < col_ptr[v + 1]; ++e) {
      if (row_idx[e] >= num_vertices) {
        throw DimensionError("row index " + std::to_string(row_idx[e]) + " out of range");
      }
      if (e > col_ptr[v] && row_idx[e] <= row_idx[e - 1]) {
        throw DimensionError("row indices of column " + std::to_string(v) +
                             " are not strictly increasing");
      }
    }
  }
  if (static_cast<std::size_t>(features.rows()) != num_vertices || features.cols() < 1) {
    throw DimensionError("feature matrix must be num_vertices x feature_len with feature_len >= 1");
  }
}

CscGraph build_csc(std::size_t num_vertices, std::vector<Edge> edges, bool undirected) {
  for (const auto& [u, v] : edges) {
    if (u >= num_vertices || v >= num_vertices) {
      throw DimensionError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                           ") out of range for " + std::to_string(num_vertices) + " vertices");
    }
  }
  if (undirected) {
    const std::size_t n = edges.size();
    edges.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) edges.emplace_back(edges[i].second, edges[i].first);
  }
  // Column-major order: by destination, then source.
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  CscGraph g;
  g.num_vertices = num_vertices;
  g.col_ptr.assign(num_vertices + 1, 0);
  g.row_idx.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    ++g.col_ptr[v + 1];
    g.row_idx.push_back(u);
  }
  for (std::size_t v = 0; v < num_vertices; ++v) g.col_ptr[v + 1] += g.col_ptr[v];
  g.features = FeatureMatrix::Zero(static_cast<Eigen::Index>(num_vertices), 1);
  return g;
}

std::size_t degree(const CscGraph& graph, VertexId v) {
  if (v >= graph.num_vertices) {
    throw DimensionError("vertex " + std::to_string(v) + " out of range");
  }
  return graph.col_ptr[v + 1] - graph.col_ptr[v];
}

CscGraph transpose(const CscGraph& graph) {
  std::vector<Edge> edges;
  edges.reserve(graph.num_edges());
  for (VertexId v = 0; v < graph.num_vertices; ++v) {
    for (VertexId u : graph.in_neighbors(v)) edges.emplace_back(v, u);
  }
  CscGraph t = build_csc(graph.num_vertices, std::move(edges));
  t.features = graph.features;
  return t;
}

CscGraph permute(const CscGraph& graph, std::span<const VertexId> perm) {
  if (perm.size() != graph.num_vertices) throw DimensionError("permutation size mismatch");
  std::vector<Edge> edges;
  edges.reserve(graph.num_edges());
  for (VertexId v = 0; v < graph.num_vertices; ++v) {
    for (VertexId u : graph.in_neighbors(v)) edges.emplace_back(perm[u], perm[v]);
  }
  CscGraph p = build_csc(graph.num_vertices, std::move(edges));
  p.features.resize(graph.features.rows(), graph.features.cols());
  for (VertexId v = 0; v < graph.num_vertices; ++v) p.features.row(perm[v]) = graph.features.row(v);
  return p;
}

}  // namespace gcnsim
