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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gcnsim {

enum class AggregateFn { Add, Max, Min, Mean, WeightedAdd };
enum class Activation { ReLU, None };
enum class LayerOrder { AggregateFirst, CombineFirst };
enum class PipelineMode { Latency, Energy, None };

std::string_view to_string(AggregateFn fn);
std::string_view to_string(Activation act);
std::string_view to_string(LayerOrder order);
std::string_view to_string(PipelineMode mode);
AggregateFn parse_aggregate_fn(std::string_view s);
Activation parse_activation(std::string_view s);
LayerOrder parse_layer_order(std::string_view s);
PipelineMode parse_pipeline_mode(std::string_view s);

/// Per-vertex neighbor-index lists for the predefined sampling policy. Entry
/// v holds positions into v's in-neighbor list.
using PredefinedSamples = std::vector<std::vector<uint32_t>>;

struct SamplingPolicy {
  enum class Kind { None, Uniform, Fraction, Predefined };
  Kind kind = Kind::None;
  std::size_t k = 0;        // Uniform: neighbors kept per vertex
  double factor = 1.0;      // Fraction: keep ceil(D / factor) neighbors
  std::string index_file;   // Predefined: source path (for echo)
  std::shared_ptr<const PredefinedSamples> predefined;

  static SamplingPolicy none() { return {}; }
  static SamplingPolicy uniform(std::size_t k);
  static SamplingPolicy fraction(double factor);
  static SamplingPolicy from_file(const std::string& path);

  std::string describe() const;
  /// "none", "uniform:K", "fraction:F" or "predefined:PATH".
  static SamplingPolicy parse(std::string_view s);
};

struct MlpShape {
  std::size_t in = 0;
  std::size_t out = 0;
};

struct LayerConfig {
  AggregateFn aggregate = AggregateFn::Add;
  bool include_self = true;  // aggregate over N(v) + {v}
  double epsilon = 0.0;      // self weight is (1 + epsilon) for Add
  // WeightedAdd degrees: D + 1 (self-loop augmented) or max(D, 1).
  bool augment_degree = true;
  std::vector<MlpShape> mlp;
  Activation activation = Activation::ReLU;
  SamplingPolicy sampling;
  LayerOrder order = LayerOrder::AggregateFirst;

  std::size_t input_len() const { return mlp.empty() ? 0 : mlp.front().in; }
  std::size_t output_len() const { return mlp.empty() ? 0 : mlp.back().out; }
  /// Feature width held in the aggregation buffer.
  std::size_t agg_len() const {
    return order == LayerOrder::AggregateFirst ? input_len() : output_len();
  }
};

/// Two GCN layers that share the input graph: the first yields the cluster
/// assignment logits, the second the embedding.
struct DiffPoolConfig {
  LayerConfig pool;
  LayerConfig embedding;
};

struct ModelConfig {
  std::string name = "custom";
  std::vector<LayerConfig> layers;
  std::optional<DiffPoolConfig> pool;
  uint64_t weight_seed = 1;

  /// Throws ConfigError unless the MLP shapes compose, starting from
  /// `input_len`.
  void validate(std::size_t input_len) const;
};

// Model presets with the layer shapes of the standard benchmark set.
ModelConfig gcn_model(std::size_t input_len, std::size_t hidden = 128, std::size_t layers = 2);
ModelConfig graphsage_model(std::size_t input_len, std::size_t hidden = 128,
                            std::size_t layers = 2, std::size_t samples = 25);
ModelConfig gin_model(std::size_t input_len, std::size_t hidden = 128, std::size_t layers = 2);
ModelConfig diffpool_model(std::size_t input_len, std::size_t clusters = 128,
                           std::size_t embedding = 128);
/// One of "gcn", "gsc", "gin", "dfp".
ModelConfig model_preset(std::string_view name, std::size_t input_len);

struct SystemConfig {
  // Aggregation engine.
  std::size_t simd_cores = 32;
  std::size_t simd_width = 16;
  bool vertex_concentrated = false;

  // Combination engine.
  std::size_t systolic_modules = 8;
  std::size_t module_rows = 4;
  std::size_t module_cols = 128;
  std::size_t modules_per_group = 1;

  // On-chip buffers (bytes).
  std::size_t edge_buffer_bytes = 2u << 20;
  std::size_t input_buffer_bytes = 128u << 10;
  std::size_t weight_buffer_bytes = 2u << 20;
  std::size_t output_buffer_bytes = 4u << 20;
  std::size_t agg_buffer_bytes = 16u << 20;

  // Off-chip memory.
  std::size_t dram_channels = 8;
  std::size_t dram_banks = 4;
  std::size_t row_buffer_bytes = 2048;
  std::size_t channel_bytes_per_cycle = 32;
  uint64_t row_hit_cycles = 20;
  uint64_t row_miss_cycles = 60;
  std::size_t edge_record_bytes = 8;
  std::size_t coefficient_bytes = 4;

  // Energy constants.
  double pj_per_dram_bit = 7.0;
  double pj_per_mac = 0.3;
  double pj_per_simd_op = 0.2;
  double pj_per_edge_buffer_byte = 0.5;
  double pj_per_input_buffer_byte = 0.5;
  double pj_per_weight_buffer_byte = 0.5;
  double pj_per_output_buffer_byte = 0.5;
  double pj_per_agg_buffer_byte = 0.5;

  // Optimization toggles.
  PipelineMode pipeline_mode = PipelineMode::Latency;
  bool coordination_enabled = true;
  bool sparsity_elimination_enabled = true;

  std::size_t total_lanes() const { return simd_cores * simd_width; }
  std::size_t peak_bytes_per_cycle() const { return dram_channels * channel_bytes_per_cycle; }

  /// Throws ConfigError on zero counts/capacities, non-power-of-two memory
  /// geometry or a group size that does not divide the module count.
  void validate() const;

  /// Accelerator defaults: 32 SIMD16 cores, 8 modules of 4x128, buffers
  /// 128 KB / 2 MB / 2 MB / 4 MB / 16 MB, 256 GB/s over 8 channels.
  static SystemConfig full_scale() { return {}; }
  /// Same compute and memory, with on-chip buffers scaled for graphs of a few
  /// hundred vertices: input 32 KB, edge 128 KB, output 256 KB, aggregation
  /// 256 KB.
  static SystemConfig desk_scale();
};

/// One key of the system configuration file / CLI. The same table drives
/// parsing, `--help` text and the report's config echo.
struct ConfigField {
  std::string key;
  std::string help;
  bool is_flag;
  std::function<void(SystemConfig&, std::string_view)> set;
  std::function<std::string(const SystemConfig&)> get;
};

const std::vector<ConfigField>& system_config_schema();

}  // namespace gcnsim
