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
#include "gcnsim/sampling.hpp"

#include <optional>
#include <vector>

namespace gcnsim {

/// y = x * weight + bias, with weight stored in x out.
struct DenseLayer {
  FeatureMatrix weight;
  FixedRow bias;

  std::size_t in_len() const { return static_cast<std::size_t>(weight.rows()); }
  std::size_t out_len() const { return static_cast<std::size_t>(weight.cols()); }
};

struct Mlp {
  std::vector<DenseLayer> layers;

  std::size_t in_len() const { return layers.empty() ? 0 : layers.front().in_len(); }
  std::size_t out_len() const { return layers.empty() ? 0 : layers.back().out_len(); }
  std::vector<MlpShape> shapes() const {
    std::vector<MlpShape> out;
    for (const auto& l : layers) out.push_back({l.in_len(), l.out_len()});
    return out;
  }
};

/// Deterministic weights: uniform in +-1/sqrt(in), bias in +-1/sqrt(in).
Mlp make_mlp(const std::vector<MlpShape>& shapes, uint64_t seed, uint64_t stream);

struct ModelWeights {
  std::vector<Mlp> layers;
  std::optional<Mlp> pool;
  std::optional<Mlp> embedding;
};

ModelWeights make_weights(const ModelConfig& model);

/// Normalization coefficient 1/sqrt(dv * du) of a WeightedAdd term, with the
/// layer's degree convention already applied to dv and du.
Fixed32 gcn_coefficient(std::size_t dv, std::size_t du);
/// Effective degree used by WeightedAdd for vertex v.
std::size_t normalized_degree(const CscGraph& graph, VertexId v, bool augment);

/// Aggregation over S(v) (and v itself when the layer includes self).
/// Neighbors are visited in ascending id order; sums are exact in a wide
/// accumulator and saturate once at the end.
FeatureMatrix aggregate(const CscGraph& graph, const LayerConfig& layer, const FeatureMatrix& input,
                        const SampleSet& sample);

/// One output row of `aggregate`; the building block shared with the
/// simulator's streaming engine.
FixedRow aggregate_vertex(const CscGraph& graph, const LayerConfig& layer,
                          const FeatureMatrix& input, const SampleSet& sample, VertexId v);

/// Row-wise MLP. Hidden stages always use ReLU; `activation` applies after
/// the last stage. Each output element is one exact dot product rounded once.
FeatureMatrix combine(const FeatureMatrix& agg, const Mlp& mlp, Activation activation);

/// Single dense stage with optional ReLU.
FeatureMatrix dense(const FeatureMatrix& x, const DenseLayer& layer, bool relu);

/// a^T * b with exact accumulation and one rounding per element.
FeatureMatrix matmul_tn(const FeatureMatrix& a, const FeatureMatrix& b);

/// Layer forward pass in the configured order.
FeatureMatrix run_layer(const CscGraph& graph, const LayerConfig& layer, const Mlp& mlp,
                        const FeatureMatrix& input, const SampleSet& sample);

enum class ReadoutMode { Sum, Concat };
FixedRow readout(const FeatureMatrix& features);
FixedRow readout(const std::vector<FeatureMatrix>& per_layer, ReadoutMode mode);

struct DiffPoolResult {
  FeatureMatrix assignment;  // C: n x clusters
  FeatureMatrix embedding;   // Z: n x d
  FeatureMatrix features;    // X' = C^T Z
  FeatureMatrix adjacency;   // A' = C^T A C (dense)
};

/// Row-wise softmax computed in double precision, then quantized.
FeatureMatrix softmax_rows(const FeatureMatrix& logits);

/// Pooled graph from a given assignment and embedding. A(u, v) = 1 for
/// every edge u -> v.
DiffPoolResult pool_graph(const CscGraph& graph, FeatureMatrix assignment, FeatureMatrix embedding);

DiffPoolResult diffpool(const CscGraph& graph, const FeatureMatrix& input,
                        const DiffPoolConfig& config, const Mlp& pool, const Mlp& embedding,
                        const SampleSet& pool_sample, const SampleSet& embedding_sample);

/// Seed of the sampler for layer `index` (pool and embedding follow the
/// regular layers).
uint64_t layer_seed(uint64_t seed, std::size_t index);

struct ReferenceRun {
  std::vector<FeatureMatrix> layer_outputs;
  std::optional<DiffPoolResult> pool;

  const FeatureMatrix& final_output() const {
    return pool ? pool->features : layer_outputs.back();
  }
};

/// End-to-end functional forward pass; the golden model.
ReferenceRun run_reference(const CscGraph& graph, const ModelConfig& model,
                           const ModelWeights& weights, uint64_t seed);
ReferenceRun run_reference(const CscGraph& graph, const ModelConfig& model, uint64_t seed);

}  // namespace gcnsim
