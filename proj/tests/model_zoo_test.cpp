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

#include "gcnsim/error.hpp"
#include "gcnsim/model_zoo.hpp"
#include "float_reference.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

namespace gcnsim {
namespace {

using testing::graph_from;
using testing::max_abs_error;
using testing::random_graph;
using testing::row_of;

LayerConfig layer_of(AggregateFn fn, std::size_t width, bool self = true) {
  LayerConfig l;
  l.aggregate = fn;
  l.include_self = self;
  l.mlp = {{width, width}};
  return l;
}

DenseLayer dense_of(const DenseMatrix<double>& w, std::initializer_list<double> b) {
  DenseLayer d;
  d.weight = quantize(w);
  d.bias = row_of(b);
  return d;
}

TEST(Aggregate, StarAddWithoutSelf) {
  const CscGraph g = graph_from(3, {{1, 0}, {2, 0}}, {{0, 0}, {1, 2}, {3, 4}});
  const auto out = aggregate(g, layer_of(AggregateFn::Add, 2, false), g.features,
                             sample(g, SamplingPolicy::none(), 0));
  EXPECT_EQ(FixedRow(out.row(0)), row_of({4, 6}));
}

TEST(Aggregate, WeightedAddOnTwoVertices) {
  const CscGraph g = graph_from(2, {{0, 1}}, {{1}, {1}});
  LayerConfig layer = layer_of(AggregateFn::WeightedAdd, 1);
  layer.augment_degree = false;
  const auto out = aggregate(g, layer, g.features, sample(g, SamplingPolicy::none(), 0));
  EXPECT_EQ(FixedRow(out.row(1)), row_of({2}));
  EXPECT_EQ(FixedRow(out.row(0)), row_of({1}));
}

TEST(Aggregate, WeightedAddAugmentedDegrees) {
  const CscGraph g = graph_from(2, {{0, 1}, {1, 0}}, {{1}, {1}});
  const auto out = aggregate(g, layer_of(AggregateFn::WeightedAdd, 1), g.features,
                             sample(g, SamplingPolicy::none(), 0));
  EXPECT_EQ(FixedRow(out.row(0)), row_of({1}));
  EXPECT_EQ(gcn_coefficient(2, 2), Fixed32::from_double(0.5));
}

TEST(Aggregate, GinSelfWeight) {
  const CscGraph g = graph_from(2, {{0, 1}}, {{2}, {4}});
  LayerConfig layer = layer_of(AggregateFn::Add, 1);
  layer.epsilon = 0.5;
  const auto out = aggregate(g, layer, g.features, sample(g, SamplingPolicy::none(), 0));
  EXPECT_EQ(FixedRow(out.row(1)), row_of({8}));
}

TEST(Aggregate, MaxMinIncludeSelf) {
  const CscGraph g = graph_from(3, {{1, 0}, {2, 0}}, {{5, -5}, {1, 2}, {3, -9}});
  const auto s = sample(g, SamplingPolicy::none(), 0);
  EXPECT_EQ(FixedRow(aggregate(g, layer_of(AggregateFn::Max, 2), g.features, s).row(0)),
            row_of({5, 2}));
  EXPECT_EQ(FixedRow(aggregate(g, layer_of(AggregateFn::Min, 2), g.features, s).row(0)),
            row_of({1, -9}));
}

TEST(Aggregate, MatchesFloatReferenceForEveryFunction) {
  for (auto fn : {AggregateFn::Add, AggregateFn::Max, AggregateFn::Min, AggregateFn::Mean,
                  AggregateFn::WeightedAdd}) {
    for (uint64_t seed = 1; seed <= 5; ++seed) {
      const CscGraph g = random_graph(50, 0.1, 8, seed);
      const LayerConfig layer = layer_of(fn, 8);
      const auto s = sample(g, SamplingPolicy::none(), seed);
      const auto fixed = aggregate(g, layer, g.features, s);
      const auto ref = testing::aggregate64(g, layer, dequantize(g.features), s);
      EXPECT_LE(max_abs_error(fixed, ref), 0x1p-10) << to_string(fn) << " seed " << seed;
    }
  }
}

TEST(Aggregate, WidthMismatchThrows) {
  const CscGraph g = random_graph(5, 0.5, 4, 1);
  EXPECT_THROW(aggregate(g, layer_of(AggregateFn::Add, 3), g.features,
                         sample(g, SamplingPolicy::none(), 0)),
               DimensionError);
}

TEST(Combine, IdentityWithRelu) {
  Mlp mlp;
  mlp.layers.push_back(dense_of(DenseMatrix<double>::Identity(2, 2), {0, 0}));
  FeatureMatrix x(1, 2);
  x.row(0) = row_of({-1, 2});
  EXPECT_EQ(FixedRow(combine(x, mlp, Activation::ReLU).row(0)), row_of({0, 2}));
}

TEST(Combine, ScalarAffine) {
  Mlp mlp;
  mlp.layers.push_back(dense_of(DenseMatrix<double>::Constant(1, 1, 2.0), {1}));
  FeatureMatrix x(1, 1);
  x(0, 0) = Fixed32(3);
  EXPECT_EQ(combine(x, mlp, Activation::None)(0, 0), Fixed32(7));
}

TEST(Combine, RandomLayerMatchesFloatReference) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const Mlp mlp = make_mlp({{16, 8}}, seed, 0);
    const FeatureMatrix x = random_features(32, 16, seed);
    const auto ref = testing::combine64(dequantize(x), mlp, Activation::None);
    EXPECT_LE(max_abs_error(combine(x, mlp, Activation::None), ref), 0x1p-8);
  }
}

TEST(Combine, IdentityMapWithoutActivation) {
  Mlp mlp;
  mlp.layers.push_back(dense_of(DenseMatrix<double>::Identity(6, 6), {0, 0, 0, 0, 0, 0}));
  const FeatureMatrix x = random_features(10, 6, 3);
  EXPECT_FALSE(first_mismatch(combine(x, mlp, Activation::None), x));
}

TEST(Combine, ShapeMismatchThrows) {
  const Mlp mlp = make_mlp({{4, 2}}, 1, 0);
  EXPECT_THROW(combine(random_features(3, 5, 1), mlp, Activation::ReLU), DimensionError);
}

TEST(Readout, SumAndConcat) {
  FeatureMatrix x(2, 2);
  x.row(0) = row_of({1, 2});
  x.row(1) = row_of({3, 4});
  EXPECT_EQ(readout(x), row_of({4, 6}));
  FeatureMatrix a(1, 1), b(1, 1);
  a(0, 0) = Fixed32(1);
  b(0, 0) = Fixed32(2);
  EXPECT_EQ(readout({a, b}, ReadoutMode::Concat), row_of({1, 2}));
  EXPECT_THROW(readout(FeatureMatrix(0, 3)), DimensionError);
}

TEST(Readout, EqualsAddAggregationAtAHubVertex) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const CscGraph g = random_graph(20, 0.2, 6, seed);
    std::vector<Edge> edges;
    for (VertexId v = 0; v < 20; ++v) {
      for (VertexId u : g.in_neighbors(v)) edges.emplace_back(u, v);
      edges.emplace_back(v, 20);
    }
    CscGraph hub = build_csc(21, edges);
    hub.features = FeatureMatrix::Zero(21, 6);
    hub.features.topRows(20) = g.features;
    const auto agg = aggregate(hub, layer_of(AggregateFn::Add, 6, false), hub.features,
                               sample(hub, SamplingPolicy::none(), 0));
    EXPECT_EQ(FixedRow(agg.row(20)), readout(g.features));
  }
}

TEST(DiffPool, IdentityAssignment) {
  const CscGraph g = random_graph(6, 0.4, 3, 2);
  const FeatureMatrix c = quantize(DenseMatrix<double>::Identity(6, 6));
  const FeatureMatrix z = random_features(6, 3, 5);
  const DiffPoolResult r = pool_graph(g, c, z);
  EXPECT_FALSE(first_mismatch(r.features, z));
  const DenseMatrix<double> a = testing::adjacency64(g);
  EXPECT_EQ(dequantize(r.adjacency), a);
}

TEST(DiffPool, SingleClusterGivesColumnSums) {
  const CscGraph g = random_graph(8, 0.3, 4, 3);
  const FeatureMatrix c = softmax_rows(FeatureMatrix::Constant(8, 1, Fixed32(3)));
  EXPECT_EQ(c, FeatureMatrix::Constant(8, 1, Fixed32(1)));
  const FeatureMatrix z = random_features(8, 4, 9);
  const DiffPoolResult r = pool_graph(g, c, z);
  EXPECT_EQ(FixedRow(r.features.row(0)), readout(z));
  EXPECT_EQ(r.adjacency(0, 0), Fixed32(static_cast<int>(g.num_edges())));
}

TEST(DiffPool, RandomInstanceMatchesFloatReference) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const CscGraph g = random_graph(12, 0.3, 8, seed);
    const ModelConfig model = diffpool_model(8, 4, 6);
    const ModelWeights w = make_weights(model);
    const ReferenceRun run = run_reference(g, model, w, seed);
    const auto ref = testing::run64(g, model, w, seed);
    EXPECT_LE(max_abs_error(run.pool->features, *ref.pooled_features), 0x1p-6);
    EXPECT_LE(max_abs_error(run.pool->adjacency, *ref.pooled_adjacency), 0x1p-6);
  }
}

TEST(Properties, PermutationEquivariance) {
  for (auto fn : {AggregateFn::Add, AggregateFn::Max, AggregateFn::Min, AggregateFn::Mean,
                  AggregateFn::WeightedAdd}) {
    const CscGraph g = random_graph(30, 0.15, 5, 11);
    std::vector<VertexId> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    auto rng = testing::rng_for(static_cast<uint64_t>(fn));
    std::shuffle(perm.begin(), perm.end(), rng);
    const CscGraph p = permute(g, perm);
    const LayerConfig layer = layer_of(fn, 5);
    const Mlp mlp = make_mlp({{5, 4}}, 3, 0);
    const auto out = run_layer(g, layer, mlp, g.features, sample(g, SamplingPolicy::none(), 0));
    const auto out_p = run_layer(p, layer, mlp, p.features, sample(p, SamplingPolicy::none(), 0));
    for (VertexId v = 0; v < 30; ++v) {
      EXPECT_EQ(FixedRow(out.row(v)), FixedRow(out_p.row(perm[v]))) << to_string(fn) << " v" << v;
    }
  }
}

TEST(Properties, MaxMinIgnoreDuplicateNeighbors) {
  const CscGraph g = random_graph(20, 0.2, 4, 4);
  for (auto fn : {AggregateFn::Max, AggregateFn::Min}) {
    const auto base = aggregate(g, layer_of(fn, 4), g.features, sample(g, SamplingPolicy::none(), 0));
    SampleSet dup;
    dup.col_ptr = {0};
    for (VertexId v = 0; v < 20; ++v) {
      for (VertexId u : g.in_neighbors(v)) {
        dup.row_idx.push_back(u);
        dup.row_idx.push_back(u);
      }
      dup.col_ptr.push_back(dup.row_idx.size());
    }
    EXPECT_FALSE(first_mismatch(aggregate(g, layer_of(fn, 4), g.features, dup), base));
  }
}

TEST(Properties, MeanOfIdenticalVectors) {
  std::vector<std::vector<double>> feats(5, {1.5, -0.25, 3.0});
  const CscGraph g = graph_from(5, {{1, 0}, {2, 0}, {3, 0}, {4, 0}}, feats);
  const auto out = aggregate(g, layer_of(AggregateFn::Mean, 3), g.features,
                             sample(g, SamplingPolicy::none(), 0));
  EXPECT_EQ(FixedRow(out.row(0)), row_of({1.5, -0.25, 3.0}));
}

TEST(Properties, ModelsTrackFloatReference) {
  for (const char* name : {"gcn", "gsc", "gin"}) {
    const CscGraph g = random_graph(64, 0.05, 16, 21);
    const ModelConfig model = model_preset(name, 16);
    const ModelWeights w = make_weights(model);
    const ReferenceRun run = run_reference(g, model, w, 3);
    const auto ref = testing::run64(g, model, w, 3);
    for (std::size_t l = 0; l < run.layer_outputs.size(); ++l) {
      const double bound = (l + 1) * 0x1p-8 * (std::string(name) == "gin" ? 4 : 1);
      EXPECT_LE(max_abs_error(run.layer_outputs[l], ref.layers[l]), bound) << name << " layer " << l;
    }
  }
}

}  // namespace
}  // namespace gcnsim
