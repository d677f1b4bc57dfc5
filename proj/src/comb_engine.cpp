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

#include "gcnsim/comb_engine.hpp"

#include "gcnsim/error.hpp"

#include <algorithm>
#include <string>

namespace gcnsim {

namespace {

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

}  // namespace

uint64_t mvm_latency(const SystolicModule& module, std::size_t agg_len, std::size_t out_len,
                     std::size_t batch) {
  if (batch == 0 || out_len == 0) return 0;
  return ceil_div(out_len, module.cols) * ceil_div(batch, module.rows) *
         (agg_len + module.rows + module.cols - 1);
}

CombGranularity set_granularity(const SystemConfig& sys, std::size_t modules_per_group) {
  if (modules_per_group == 0 || sys.systolic_modules % modules_per_group != 0) {
    throw ConfigError("modules_per_group " + std::to_string(modules_per_group) +
                      " does not divide " + std::to_string(sys.systolic_modules) + " modules");
  }
  CombGranularity g;
  g.group_size = modules_per_group;
  g.units = sys.systolic_modules / modules_per_group;
  g.unit = {sys.module_rows * modules_per_group, sys.module_cols, 0};
  return g;
}

CombStats& CombStats::operator+=(const CombStats& o) {
  macs += o.macs;
  busy_cycles += o.busy_cycles;
  passes += o.passes;
  weight_buffer_reads += o.weight_buffer_reads;
  vertices += o.vertices;
  return *this;
}

CombEngine::CombEngine(CombGranularity granularity)
    : g_(granularity), unit_free_(granularity.units, 0) {}

CombPass CombEngine::dispatch(std::size_t batch, uint64_t ready,
                              const std::vector<MlpShape>& shapes) {
  if (batch == 0 || batch > g_.batch_vertices()) {
    throw SimulationError("combination batch of " + std::to_string(batch) + " vertices");
  }
  const auto it = std::min_element(unit_free_.begin(), unit_free_.end());
  CombPass pass;
  pass.unit = static_cast<std::size_t>(it - unit_free_.begin());
  pass.start = std::max(ready, *it);
  uint64_t cycles = 0;
  for (const auto& shape : shapes) {
    cycles += mvm_latency(g_.unit, shape.in, shape.out, batch);
    stats_.macs += uint64_t{batch} * shape.in * shape.out;
    stats_.weight_buffer_reads += uint64_t{shape.in} * shape.out;
  }
  pass.end = pass.start + cycles;
  *it = pass.end;
  stats_.busy_cycles += cycles;
  ++stats_.passes;
  stats_.vertices += batch;
  return pass;
}

uint64_t CombEngine::all_idle_at() const {
  return unit_free_.empty() ? 0 : *std::max_element(unit_free_.begin(), unit_free_.end());
}

FeatureMatrix CombEngine::stage(const FeatureMatrix& x, const DenseLayer& layer, bool relu) const {
  const auto batch = x.rows();
  const auto in = layer.weight.rows();
  const auto out = layer.weight.cols();
  if (x.cols() != in) throw DimensionError("combination input width does not match the weights");
  const auto rows = static_cast<Eigen::Index>(g_.unit.rows);
  const auto cols = static_cast<Eigen::Index>(g_.unit.cols);
  FeatureMatrix y(batch, out);
  std::vector<__int128> pe(static_cast<std::size_t>(rows * cols));
  for (Eigen::Index c0 = 0; c0 < out; c0 += cols) {
    const Eigen::Index nc = std::min(cols, out - c0);
    for (Eigen::Index r0 = 0; r0 < batch; r0 += rows) {
      const Eigen::Index nr = std::min(rows, batch - r0);
      std::fill(pe.begin(), pe.end(), 0);
      // Stream the reduction dimension through the tile.
      for (Eigen::Index k = 0; k < in; ++k) {
        for (Eigen::Index r = 0; r < nr; ++r) {
          const int64_t a = x(r0 + r, k).raw();
          for (Eigen::Index c = 0; c < nc; ++c) {
            pe[r * cols + c] += static_cast<__int128>(a * layer.weight(k, c0 + c).raw());
          }
        }
      }
      for (Eigen::Index r = 0; r < nr; ++r) {
        for (Eigen::Index c = 0; c < nc; ++c) {
          const __int128 acc = pe[r * cols + c] +
                               (static_cast<__int128>(layer.bias(c0 + c).raw()) << Fixed32::kFracBits);
          Fixed32 v = Fixed32::saturate(Fixed32::round_shift(acc, Fixed32::kFracBits));
          y(r0 + r, c0 + c) = relu && v < Fixed32{} ? Fixed32{} : v;
        }
      }
    }
  }
  return y;
}

FeatureMatrix CombEngine::compute(const FeatureMatrix& inputs, const Mlp& mlp,
                                  Activation activation) const {
  FeatureMatrix h = inputs;
  for (std::size_t s = 0; s < mlp.layers.size(); ++s) {
    const bool last = s + 1 == mlp.layers.size();
    h = stage(h, mlp.layers[s], !last || activation == Activation::ReLU);
  }
  return h;
}

FeatureMatrix CombEngine::compute_tn(const FeatureMatrix& a, const FeatureMatrix& b) const {
  DenseLayer layer;
  layer.weight = b;
  layer.bias = FixedRow::Zero(b.cols());
  return stage(a.transpose(), layer, false);
}

}  // namespace gcnsim
