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

#include "gcnsim/graph.hpp"

#include <filesystem>
#include <iosfwd>

namespace gcnsim {

// Edge list text: one "src dst" pair per line, 0-based ids, '#' starts a
// comment. Blank lines are ignored.
CscGraph load_edge_list(std::istream& in, std::size_t num_vertices, bool undirected = false);
CscGraph load_edge_list(const std::filesystem::path& path, std::size_t num_vertices,
                        bool undirected = false);
void write_edge_list(std::ostream& out, const CscGraph& graph);

// Features: CSV text (one vertex per line, comma separated) or, for any other
// extension, raw little-endian float64 in row-major order. Values are
// quantized to Q16.16.
CscGraph load_features(std::istream& csv, CscGraph graph, std::size_t feature_len);
CscGraph load_features(const std::filesystem::path& path, CscGraph graph, std::size_t feature_len);
void write_features_csv(std::ostream& out, const FeatureMatrix& features);

// Binary container: "HYG1", u64 num_vertices, u64 num_edges, u64 feature_len,
// u64 col_ptr[num_vertices + 1], u32 row_idx[num_edges], i32 raw features
// (row-major). All little-endian.
void write_container(std::ostream& out, const CscGraph& graph);
void write_container(const std::filesystem::path& path, const CscGraph& graph);
CscGraph read_container(std::istream& in);
CscGraph read_container(const std::filesystem::path& path);

/// Feature-only container (num_edges = 0), used for golden dumps.
void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix read_matrix(const std::filesystem::path& path);

}  // namespace gcnsim
