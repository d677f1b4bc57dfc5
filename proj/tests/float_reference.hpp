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
#include "gcnsim/fixed.hpp"
#include "gcnsim/graph.hpp"
#include "gcnsim/model_zoo.hpp"
#include "gcnsim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

// Double-precision forward pass written directly from the layer equations.
// It shares no arithmetic with the fixed-point model and serves as the
// independent oracle for numerical tests.
namespace gcnsim::testing {

using Matrix64 = DenseMatrix<double>;

inline double degree64(const CscGraph& g, VertexId v, bool augment) {
  const double d = static_cast<double>(g.col_ptr[v + 1] - g.col_ptr[v]);
  return augment ? d + 1.0 : std::max(d, 1.0);
}

inline Matrix64 aggregate64(const CscGraph& g, const LayerConfig& layer, const Matrix64& x,
                            const SampleSet& s) {
  Matrix64 out = Matrix64::Zero(x.rows(), x.cols());
  for (VertexId v = 0; v < g.num_vertices; ++v) {
    std::vector<VertexId> members(s.neighbors(v).begin(), s.neighbors(v).end());
    switch (layer.aggregate) {
      case AggregateFn::Max:
      case AggregateFn::Min: {
        if (layer.include_self) members.push_back(v);
        if (members.empty()) break;
        out.row(v) = x.row(members[0]);
        for (VertexId u : members) {
          if (layer.aggregate == AggregateFn::Max) {
            out.row(v) = out.row(v).cwiseMax(x.row(u));
          } else {
            out.row(v) = out.row(v).cwiseMin(x.row(u));
          }
        }
        break;
      }
      case AggregateFn::Add:
        for (VertexId u : members) out.row(v) += x.row(u);
        if (layer.include_self) out.row(v) += (1.0 + layer.epsilon) * x.row(v);
        break;
      case AggregateFn::Mean: {
        for (VertexId u : members) out.row(v) += x.row(u);
        if (layer.include_self) out.row(v) += x.row(v);
        const double count = static_cast<double>(members.size() + (layer.include_self ? 1 : 0));
        if (count > 0) out.row(v) /= count;
        break;
      }
      case AggregateFn::WeightedAdd: {
        const double dv = degree64(g, v, layer.augment_degree);
        for (VertexId u : members) {
          out.row(v) += x.row(u) / std::sqrt(dv * degree64(g, u, layer.augment_degree));
        }
        if (layer.include_self) out.row(v) += x.row(v) / dv;
        break;
      }
    }
  }
  return out;
}

inline Matrix64 combine64(const Matrix64& x, const Mlp& mlp, Activation act) {
  Matrix64 h = x;
  for (std::size_t s = 0; s < mlp.layers.size(); ++s) {
    const Matrix64 w = dequantize(mlp.layers[s].weight);
    const Eigen::RowVectorXd b =
        mlp.layers[s].bias.unaryExpr([](Fixed32 f) { return f.to_double(); });
    Matrix64 y = h * w;
    y.rowwise() += b;
    if (s + 1 < mlp.layers.size() || act == Activation::ReLU) y = y.cwiseMax(0.0);
    h = y;
  }
  return h;
}

inline Matrix64 layer64(const CscGraph& g, const LayerConfig& layer, const Mlp& mlp,
                        const Matrix64& x, const SampleSet& s) {
  if (layer.order == LayerOrder::AggregateFirst) {
    return combine64(aggregate64(g, layer, x, s), mlp, layer.activation);
  }
  return aggregate64(g, layer, combine64(x, mlp, layer.activation), s);
}

inline Matrix64 softmax64(Matrix64 x) {
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    row = (row.array() - row.maxCoeff()).exp().matrix();
    row /= row.sum();
  }
  return x;
}

inline Matrix64 adjacency64(const CscGraph& g) {
  Matrix64 a = Matrix64::Zero(static_cast<Eigen::Index>(g.num_vertices),
                              static_cast<Eigen::Index>(g.num_vertices));
  for (VertexId v = 0; v < g.num_vertices; ++v) {
    for (VertexId u : g.in_neighbors(v)) a(u, v) = 1.0;
  }
  return a;
}

struct Reference64 {
  std::vector<Matrix64> layers;
  std::optional<Matrix64> pooled_features;
  std::optional<Matrix64> pooled_adjacency;
};

inline Reference64 run64(const CscGraph& g, const ModelConfig& model, const ModelWeights& w,
                         uint64_t seed) {
  Reference64 r;
  Matrix64 h = dequantize(g.features);
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    h = layer64(g, layer, w.layers[l], h, sample(g, layer.sampling, layer_seed(seed, l)));
    r.layers.push_back(h);
  }
  if (model.pool) {
    const std::size_t base = model.layers.size();
    const auto& p = *model.pool;
    const Matrix64 c = softmax64(
        layer64(g, p.pool, *w.pool, h, sample(g, p.pool.sampling, layer_seed(seed, base))));
    const Matrix64 z = layer64(g, p.embedding, *w.embedding, h,
                               sample(g, p.embedding.sampling, layer_seed(seed, base + 1)));
    r.pooled_features = c.transpose() * z;
    r.pooled_adjacency = c.transpose() * adjacency64(g) * c;
  }
  return r;
}

}  // namespace gcnsim::testing
