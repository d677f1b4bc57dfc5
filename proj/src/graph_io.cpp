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

#include "gcnsim/graph_io.hpp"

#include "gcnsim/error.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace gcnsim {

namespace {

constexpr std::array<char, 4> kMagic{'H', 'Y', 'G', '1'};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(u & 0xFF);
    u = static_cast<U>(u >> 8);
  }
  out.write(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::make_unsigned_t<T>;
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw ParseError("container truncated");
  }
  U u = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<U>((u << 8) | bytes[i]);
  return static_cast<T>(u);
}

}  // namespace

CscGraph load_edge_list(std::istream& in, std::size_t num_vertices, bool undirected) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    uint64_t ids[2];
    const char* p = view.data();
    const char* end = view.data() + view.size();
    for (int k = 0; k < 2; ++k) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == ',')) ++p;
      auto [next, ec] = std::from_chars(p, end, ids[k]);
      if (ec != std::errc{}) throw ParseError("expected two vertex ids", line_no);
      p = next;
    }
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    if (p != end) throw ParseError("trailing characters after edge", line_no);
    for (uint64_t id : ids) {
      if (id >= num_vertices) {
        throw ParseError("vertex id " + std::to_string(id) + " out of range (" +
                             std::to_string(num_vertices) + " vertices)",
                         line_no);
      }
    }
    edges.emplace_back(static_cast<VertexId>(ids[0]), static_cast<VertexId>(ids[1]));
  }
  return build_csc(num_vertices, std::move(edges), undirected);
}

CscGraph load_edge_list(const std::filesystem::path& path, std::size_t num_vertices,
                        bool undirected) {
  auto in = open_in(path);
  return load_edge_list(in, num_vertices, undirected);
}

void write_edge_list(std::ostream& out, const CscGraph& graph) {
  out << "# " << graph.num_vertices << " vertices, " << graph.num_edges() << " edges\n";
  for (VertexId v = 0; v < graph.num_vertices; ++v) {
    for (VertexId u : graph.in_neighbors(v)) out << u << ' ' << v << '\n';
  }
}

CscGraph load_features(std::istream& csv, CscGraph graph, std::size_t feature_len) {
  const auto n = static_cast<Eigen::Index>(graph.num_vertices);
  const auto f = static_cast<Eigen::Index>(feature_len);
  DenseMatrix<double> values(n, f);
  std::string line;
  Eigen::Index row = 0;
  std::size_t line_no = 0;
  while (std::getline(csv, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (row >= n) throw DimensionError("feature file has more than " + std::to_string(n) + " rows");
    Eigen::Index col = 0;
    std::size_t pos = 0;
    while (pos <= view.size()) {
      auto comma = view.find(',', pos);
      if (comma == std::string_view::npos) comma = view.size();
      std::string_view cell = trim(view.substr(pos, comma - pos));
      if (col >= f) {
        throw DimensionError("feature row " + std::to_string(row) + " has more than " +
                             std::to_string(f) + " columns");
      }
      double v = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw ParseError("bad feature value '" + std::string(cell) + "'", line_no);
      }
      values(row, col++) = v;
      pos = comma + 1;
    }
    if (col != f) {
      throw DimensionError("feature row " + std::to_string(row) + " has " + std::to_string(col) +
                           " columns, expected " + std::to_string(f));
    }
    ++row;
  }
  if (row != n) {
    throw DimensionError("feature file has " + std::to_string(row) + " rows, expected " +
                         std::to_string(n));
  }
  graph.features = quantize(values);
  return graph;
}

CscGraph load_features(const std::filesystem::path& path, CscGraph graph,
                       std::size_t feature_len) {
  if (path.extension() == ".csv") {
    auto in = open_in(path);
    return load_features(in, std::move(graph), feature_len);
  }
  auto in = open_in(path, std::ios::binary);
  const auto n = static_cast<Eigen::Index>(graph.num_vertices);
  const auto f = static_cast<Eigen::Index>(feature_len);
  const auto expected = static_cast<std::uintmax_t>(n * f) * sizeof(double);
  const auto actual = std::filesystem::file_size(path);
  if (actual != expected) {
    throw DimensionError(path.string() + " holds " + std::to_string(actual) + " bytes, expected " +
                         std::to_string(expected) + " for a " + std::to_string(n) + "x" +
                         std::to_string(f) + " float64 matrix");
  }
  DenseMatrix<double> values(n, f);
  for (Eigen::Index i = 0; i < n * f; ++i) {
    values.data()[i] = std::bit_cast<double>(get_le<uint64_t>(in));
  }
  graph.features = quantize(values);
  return graph;
}

void write_features_csv(std::ostream& out, const FeatureMatrix& features) {
  std::ostringstream row;
  row.precision(17);
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    row.str({});
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      if (c) row << ',';
      row << features(r, c).to_double();
    }
    out << row.str() << '\n';
  }
}

void write_container(std::ostream& out, const CscGraph& graph) {
  out.write(kMagic.data(), kMagic.size());
  put_le<uint64_t>(out, graph.num_vertices);
  put_le<uint64_t>(out, graph.num_edges());
  put_le<uint64_t>(out, graph.feature_len());
  for (uint64_t p : graph.col_ptr) put_le<uint64_t>(out, p);
  for (VertexId u : graph.row_idx) put_le<uint32_t>(out, u);
  for (Eigen::Index i = 0; i < graph.features.size(); ++i) {
    put_le<int32_t>(out, graph.features.data()[i].raw());
  }
  if (!out) throw IoError("container write failed");
}

void write_container(const std::filesystem::path& path, const CscGraph& graph) {
  auto out = open_out(path);
  write_container(out, graph);
}

CscGraph read_container(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("not a HYG1 container");
  }
  CscGraph g;
  g.num_vertices = get_le<uint64_t>(in);
  const auto num_edges = get_le<uint64_t>(in);
  const auto feature_len = get_le<uint64_t>(in);
  g.col_ptr.resize(g.num_vertices + 1);
  for (auto& p : g.col_ptr) p = get_le<uint64_t>(in);
  g.row_idx.resize(num_edges);
  for (auto& u : g.row_idx) u = get_le<uint32_t>(in);
  g.features.resize(static_cast<Eigen::Index>(g.num_vertices),
                    static_cast<Eigen::Index>(feature_len));
  for (Eigen::Index i = 0; i < g.features.size(); ++i) {
    g.features.data()[i] = Fixed32::from_raw(get_le<int32_t>(in));
  }
  return g;
}

CscGraph read_container(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  CscGraph g = read_container(in);
  g.validate();
  return g;
}

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& m) {
  CscGraph g;
  g.num_vertices = static_cast<std::size_t>(m.rows());
  g.col_ptr.assign(g.num_vertices + 1, 0);
  g.features = m;
  write_container(path, g);
}

FeatureMatrix read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::binary);
  return read_container(in).features;
}

}  // namespace gcnsim
