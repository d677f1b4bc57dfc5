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

#include "gcnsim/model_zoo.hpp"

#include "gcnsim/error.hpp"

#include <cmath>
#include <random>
#include <string>

namespace gcnsim {

namespace {

double unit_real(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void require_width(const FeatureMatrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

}  // namespace

Mlp make_mlp(const std::vector<MlpShape>& shapes, uint64_t seed, uint64_t stream) {
  Mlp mlp;
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    const auto in = static_cast<Eigen::Index>(shapes[s].in);
    const auto out = static_cast<Eigen::Index>(shapes[s].out);
    std::mt19937_64 rng(mix_seed(seed, stream * 64 + s));
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer;
    layer.weight.resize(in, out);
    layer.bias.resize(out);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) {
      layer.weight.data()[i] = Fixed32::from_double((2.0 * unit_real(rng) - 1.0) * bound);
    }
    for (Eigen::Index o = 0; o < out; ++o) {
      layer.bias(o) = Fixed32::from_double((2.0 * unit_real(rng) - 1.0) * bound);
    }
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

ModelWeights make_weights(const ModelConfig& model) {
  ModelWeights w;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    w.layers.push_back(make_mlp(model.layers[l].mlp, model.weight_seed, l));
  }
  if (model.pool) {
    w.pool = make_mlp(model.pool->pool.mlp, model.weight_seed, 1000);
    w.embedding = make_mlp(model.pool->embedding.mlp, model.weight_seed, 1001);
  }
  return w;
}

Fixed32 gcn_coefficient(std::size_t dv, std::size_t du) {
  return Fixed32::from_double(1.0 / std::sqrt(static_cast<double>(dv) * static_cast<double>(du)));
}

std::size_t normalized_degree(const CscGraph& graph, VertexId v, bool augment) {
  const std::size_t d = degree(graph, v);
  return augment ? d + 1 : std::max<std::size_t>(d, 1);
}

FixedRow aggregate_vertex(const CscGraph& graph, const LayerConfig& layer,
                          const FeatureMatrix& input, const SampleSet& sample, VertexId v) {
  const Eigen::Index f = input.cols();
  const auto neighbors = sample.neighbors(v);
  const bool self = layer.include_self;
  FixedRow out = FixedRow::Zero(f);

  switch (layer.aggregate) {
    case AggregateFn::Max:
    case AggregateFn::Min: {
      if (neighbors.empty() && !self) return out;
      const bool is_max = layer.aggregate == AggregateFn::Max;
      out = self ? FixedRow(input.row(v)) : FixedRow(input.row(neighbors.front()));
      for (VertexId u : neighbors) {
        for (Eigen::Index k = 0; k < f; ++k) {
          const Fixed32 x = input(u, k);
          if (is_max ? x > out(k) : x < out(k)) out(k) = x;
        }
      }
      return out;
    }
    case AggregateFn::Add:
    case AggregateFn::Mean:
    case AggregateFn::WeightedAdd:
      break;
  }

  std::vector<int64_t> acc(static_cast<std::size_t>(f), 0);
  if (layer.aggregate == AggregateFn::WeightedAdd) {
    const std::size_t dv = normalized_degree(graph, v, layer.augment_degree);
    for (VertexId u : neighbors) {
      const Fixed32 c = gcn_coefficient(dv, normalized_degree(graph, u, layer.augment_degree));
      for (Eigen::Index k = 0; k < f; ++k) acc[k] += (c * input(u, k)).raw();
    }
    if (self) {
      const Fixed32 c = gcn_coefficient(dv, dv);
      for (Eigen::Index k = 0; k < f; ++k) acc[k] += (c * input(v, k)).raw();
    }
  } else {
    for (VertexId u : neighbors) {
      for (Eigen::Index k = 0; k < f; ++k) acc[k] += input(u, k).raw();
    }
    if (self) {
      if (layer.aggregate == AggregateFn::Add && layer.epsilon != 0.0) {
        const Fixed32 scale = Fixed32::from_double(1.0 + layer.epsilon);
        for (Eigen::Index k = 0; k < f; ++k) acc[k] += (scale * input(v, k)).raw();
      } else {
        for (Eigen::Index k = 0; k < f; ++k) acc[k] += input(v, k).raw();
      }
    }
  }

  if (layer.aggregate == AggregateFn::Mean) {
    const auto count = static_cast<int64_t>(neighbors.size() + (self ? 1 : 0));
    if (count == 0) return out;
    for (Eigen::Index k = 0; k < f; ++k) out(k) = divide_raw(acc[k], count);
  } else {
    for (Eigen::Index k = 0; k < f; ++k) out(k) = Fixed32::saturate(acc[k]);
  }
  return out;
}

FeatureMatrix aggregate(const CscGraph& graph, const LayerConfig& layer, const FeatureMatrix& input,
                        const SampleSet& sample) {
  require_width(input, graph.num_vertices, layer.agg_len(), "aggregate input");
  if (sample.num_vertices() != graph.num_vertices) {
    throw DimensionError("sample set does not match graph size");
  }
  FeatureMatrix out(input.rows(), input.cols());
  for (VertexId v = 0; v < graph.num_vertices; ++v) {
    out.row(v) = aggregate_vertex(graph, layer, input, sample, v);
  }
  return out;
}

FeatureMatrix dense(const FeatureMatrix& x, const DenseLayer& layer, bool relu) {
  if (static_cast<std::size_t>(x.cols()) != layer.in_len()) {
    throw DimensionError("dense stage expects width " + std::to_string(layer.in_len()) + ", got " +
                         std::to_string(x.cols()));
  }
  if (layer.bias.size() != layer.weight.cols()) throw DimensionError("bias length mismatch");
  const Eigen::Index in = layer.weight.rows();
  const Eigen::Index out_len = layer.weight.cols();
  FeatureMatrix out(x.rows(), out_len);
  std::vector<__int128> acc(static_cast<std::size_t>(out_len));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index o = 0; o < out_len; ++o) {
      acc[o] = static_cast<__int128>(layer.bias(o).raw()) << Fixed32::kFracBits;
    }
    for (Eigen::Index k = 0; k < in; ++k) {
      const int64_t xv = x(r, k).raw();
      if (xv == 0) continue;
      const Fixed32* w = layer.weight.row(k).data();
      for (Eigen::Index o = 0; o < out_len; ++o) acc[o] += static_cast<__int128>(xv * w[o].raw());
    }
    for (Eigen::Index o = 0; o < out_len; ++o) {
      Fixed32 y = Fixed32::saturate(Fixed32::round_shift(acc[o], Fixed32::kFracBits));
      out(r, o) = relu && y < Fixed32{} ? Fixed32{} : y;
    }
  }
  return out;
}

FeatureMatrix combine(const FeatureMatrix& agg, const Mlp& mlp, Activation activation) {
  if (mlp.layers.empty()) throw DimensionError("empty MLP");
  FeatureMatrix h = agg;
  for (std::size_t s = 0; s < mlp.layers.size(); ++s) {
    const bool last = s + 1 == mlp.layers.size();
    h = dense(h, mlp.layers[s], !last || activation == Activation::ReLU);
  }
  return h;
}

FeatureMatrix matmul_tn(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("matmul_tn: row count mismatch");
  const Eigen::Index p = a.cols();
  const Eigen::Index q = b.cols();
  std::vector<__int128> acc(static_cast<std::size_t>(p * q), 0);
  for (Eigen::Index v = 0; v < a.rows(); ++v) {
    for (Eigen::Index i = 0; i < p; ++i) {
      const int64_t av = a(v, i).raw();
      if (av == 0) continue;
      for (Eigen::Index j = 0; j < q; ++j) acc[i * q + j] += static_cast<__int128>(av * b(v, j).raw());
    }
  }
  FeatureMatrix out(p, q);
  for (Eigen::Index i = 0; i < p * q; ++i) {
    out.data()[i] = Fixed32::saturate(Fixed32::round_shift(acc[i], Fixed32::kFracBits));
  }
  return out;
}

FeatureMatrix run_layer(const CscGraph& graph, const LayerConfig& layer, const Mlp& mlp,
                        const FeatureMatrix& input, const SampleSet& sample) {
  if (layer.order == LayerOrder::AggregateFirst) {
    return combine(aggregate(graph, layer, input, sample), mlp, layer.activation);
  }
  return aggregate(graph, layer, combine(input, mlp, layer.activation), sample);
}

FixedRow readout(const FeatureMatrix& features) {
  if (features.rows() == 0) throw DimensionError("readout of an empty graph");
  FixedRow out(features.cols());
  for (Eigen::Index k = 0; k < features.cols(); ++k) {
    int64_t acc = 0;
    for (Eigen::Index v = 0; v < features.rows(); ++v) acc += features(v, k).raw();
    out(k) = Fixed32::saturate(acc);
  }
  return out;
}

FixedRow readout(const std::vector<FeatureMatrix>& per_layer, ReadoutMode mode) {
  if (per_layer.empty()) throw DimensionError("readout of an empty layer list");
  if (mode == ReadoutMode::Sum) return readout(per_layer.back());
  Eigen::Index width = 0;
  for (const auto& m : per_layer) width += m.cols();
  FixedRow out(width);
  Eigen::Index at = 0;
  for (const auto& m : per_layer) {
    out.segment(at, m.cols()) = readout(m);
    at += m.cols();
  }
  return out;
}

FeatureMatrix softmax_rows(const FeatureMatrix& logits) {
  DenseMatrix<double> x = dequantize(logits);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    row = (row.array() - row.maxCoeff()).exp().matrix();
    row /= row.sum();
  }
  return quantize(x);
}

DiffPoolResult pool_graph(const CscGraph& graph, FeatureMatrix assignment, FeatureMatrix embedding) {
  if (static_cast<std::size_t>(assignment.rows()) != graph.num_vertices ||
      embedding.rows() != assignment.rows()) {
    throw DimensionError("assignment/embedding rows must equal the vertex count");
  }
  // (A C)(u) sums C over the out-neighbors of u: an Add aggregation on the
  // transposed graph.
  const CscGraph t = transpose(graph);
  FeatureMatrix ac(assignment.rows(), assignment.cols());
  for (VertexId u = 0; u < t.num_vertices; ++u) {
    for (Eigen::Index k = 0; k < assignment.cols(); ++k) {
      int64_t acc = 0;
      for (VertexId v : t.in_neighbors(u)) acc += assignment(v, k).raw();
      ac(u, k) = Fixed32::saturate(acc);
    }
  }
  DiffPoolResult r;
  r.features = matmul_tn(assignment, embedding);
  r.adjacency = matmul_tn(assignment, ac);
  r.assignment = std::move(assignment);
  r.embedding = std::move(embedding);
  return r;
}

DiffPoolResult diffpool(const CscGraph& graph, const FeatureMatrix& input,
                        const DiffPoolConfig& config, const Mlp& pool, const Mlp& embedding,
                        const SampleSet& pool_sample, const SampleSet& embedding_sample) {
  FeatureMatrix logits = run_layer(graph, config.pool, pool, input, pool_sample);
  FeatureMatrix z = run_layer(graph, config.embedding, embedding, input, embedding_sample);
  return pool_graph(graph, softmax_rows(logits), std::move(z));
}

uint64_t layer_seed(uint64_t seed, std::size_t index) { return mix_seed(seed, 0x5A000 + index); }

ReferenceRun run_reference(const CscGraph& graph, const ModelConfig& model,
                           const ModelWeights& weights, uint64_t seed) {
  model.validate(graph.feature_len());
  ReferenceRun run;
  FeatureMatrix h = graph.features;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    h = run_layer(graph, layer, weights.layers.at(l), h, sample(graph, layer.sampling, layer_seed(seed, l)));
    run.layer_outputs.push_back(h);
  }
  if (model.pool) {
    const std::size_t base = model.layers.size();
    run.pool = diffpool(graph, h, *model.pool, weights.pool.value(), weights.embedding.value(),
                        sample(graph, model.pool->pool.sampling, layer_seed(seed, base)),
                        sample(graph, model.pool->embedding.sampling, layer_seed(seed, base + 1)));
  }
  return run;
}

ReferenceRun run_reference(const CscGraph& graph, const ModelConfig& model, uint64_t seed) {
  return run_reference(graph, model, make_weights(model), seed);
}

}  // namespace gcnsim
