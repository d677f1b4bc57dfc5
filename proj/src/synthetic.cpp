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

#include "gcnsim/synthetic.hpp"

#include "gcnsim/error.hpp"
#include "gcnsim/sampling.hpp"

#include <cmath>
#include <random>
#include <string>

namespace gcnsim {

namespace {

constexpr uint64_t kEdgeStream = 0xE0;
constexpr uint64_t kFeatureStream = 0xF0;

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

CscGraph erdos_renyi(std::size_t n, double p, uint64_t seed, bool undirected) {
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("edge probability must lie in [0, 1]");
  std::mt19937_64 rng(mix_seed(seed, kEdgeStream));
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = undirected ? u + 1 : 0; v < n; ++v) {
      if (u == v) continue;
      if (unit(rng) < p) edges.emplace_back(u, v);
    }
  }
  return build_csc(n, std::move(edges), undirected);
}

CscGraph power_law(std::size_t n, double alpha, double mean_degree, uint64_t seed) {
  if (!(alpha > 1.0)) throw ConfigError("power-law exponent must exceed 1");
  if (!(mean_degree >= 0.0)) throw ConfigError("mean degree must be non-negative");
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::pow(static_cast<double>(i + 1), -1.0 / (alpha - 1.0));
    total += w[i];
  }
  if (total > 0.0) {
    for (auto& x : w) x *= mean_degree * static_cast<double>(n) / total;
  }
  const double s = mean_degree * static_cast<double>(n);
  std::mt19937_64 rng(mix_seed(seed, kEdgeStream));
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      const double p = s > 0.0 ? std::min(1.0, w[u] * w[v] / s) : 0.0;
      if (unit(rng) < p) edges.emplace_back(u, v);
    }
  }
  return build_csc(n, std::move(edges), true);
}

FeatureMatrix random_features(std::size_t n, std::size_t feature_len, uint64_t seed) {
  if (feature_len == 0) throw ConfigError("feature length must be positive");
  std::mt19937_64 rng(mix_seed(seed, kFeatureStream));
  FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(feature_len));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = Fixed32::from_double(2.0 * unit(rng) - 1.0);
  return x;
}

}  // namespace gcnsim
