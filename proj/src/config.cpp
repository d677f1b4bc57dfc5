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

#include "gcnsim/config.hpp"

#include "gcnsim/error.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gcnsim {

namespace {

template <typename E>
struct EnumName {
  E value;
  std::string_view name;
};

constexpr EnumName<AggregateFn> kAggregateNames[] = {{AggregateFn::Add, "add"},
                                                     {AggregateFn::Max, "max"},
                                                     {AggregateFn::Min, "min"},
                                                     {AggregateFn::Mean, "mean"},
                                                     {AggregateFn::WeightedAdd, "weighted_add"}};
constexpr EnumName<Activation> kActivationNames[] = {{Activation::ReLU, "relu"},
                                                     {Activation::None, "none"}};
constexpr EnumName<LayerOrder> kOrderNames[] = {{LayerOrder::AggregateFirst, "aggregate-first"},
                                                {LayerOrder::CombineFirst, "combine-first"}};
constexpr EnumName<PipelineMode> kPipelineNames[] = {{PipelineMode::Latency, "latency"},
                                                     {PipelineMode::Energy, "energy"},
                                                     {PipelineMode::None, "none"}};

template <typename E, std::size_t N>
std::string_view name_of(const EnumName<E> (&table)[N], E value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "?";
}

template <typename E, std::size_t N>
E value_of(const EnumName<E> (&table)[N], std::string_view s, std::string_view what) {
  for (const auto& entry : table) {
    if (entry.name == s) return entry.value;
  }
  std::string options;
  for (const auto& entry : table) options += (options.empty() ? "" : ", ") + std::string(entry.name);
  throw ConfigError("unknown " + std::string(what) + " '" + std::string(s) + "' (expected one of " +
                    options + ")");
}

std::size_t parse_count(std::string_view s, std::string_view key) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer, got '" +
                      std::string(s) + "'");
  }
  return v;
}

double parse_real(std::string_view s, std::string_view key) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view s, std::string_view key) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  throw ConfigError("'" + std::string(key) + "' expects true/false, got '" + std::string(s) + "'");
}

std::string format_real(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

LayerConfig gcn_layer(std::size_t in, std::size_t out, AggregateFn fn) {
  LayerConfig layer;
  layer.aggregate = fn;
  layer.mlp = {{in, out}};
  return layer;
}

}  // namespace

std::string_view to_string(AggregateFn fn) { return name_of(kAggregateNames, fn); }
std::string_view to_string(Activation act) { return name_of(kActivationNames, act); }
std::string_view to_string(LayerOrder order) { return name_of(kOrderNames, order); }
std::string_view to_string(PipelineMode mode) { return name_of(kPipelineNames, mode); }
AggregateFn parse_aggregate_fn(std::string_view s) {
  return value_of(kAggregateNames, s, "aggregate function");
}
Activation parse_activation(std::string_view s) { return value_of(kActivationNames, s, "activation"); }
LayerOrder parse_layer_order(std::string_view s) { return value_of(kOrderNames, s, "layer order"); }
PipelineMode parse_pipeline_mode(std::string_view s) {
  return value_of(kPipelineNames, s, "pipeline mode");
}

SamplingPolicy SamplingPolicy::uniform(std::size_t k) {
  if (k < 1) throw ConfigError("uniform sampling requires k >= 1");
  SamplingPolicy p;
  p.kind = Kind::Uniform;
  p.k = k;
  return p;
}

SamplingPolicy SamplingPolicy::fraction(double factor) {
  if (!(factor >= 1.0)) throw ConfigError("sampling factor must be >= 1");
  SamplingPolicy p;
  p.kind = Kind::Fraction;
  p.factor = factor;
  return p;
}

SamplingPolicy SamplingPolicy::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sample index file " + path);
  auto samples = std::make_shared<PredefinedSamples>();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream tokens(line);
    std::size_t v = 0;
    if (!(tokens >> v)) continue;
    if (samples->size() <= v) samples->resize(v + 1);
    uint64_t idx = 0;
    while (tokens >> idx) (*samples)[v].push_back(static_cast<uint32_t>(idx));
    if (!tokens.eof()) throw ParseError("bad sample index list", line_no);
  }
  SamplingPolicy p;
  p.kind = Kind::Predefined;
  p.index_file = path;
  p.predefined = std::move(samples);
  return p;
}

std::string SamplingPolicy::describe() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Uniform: return "uniform:" + std::to_string(k);
    case Kind::Fraction: return "fraction:" + format_real(factor);
    case Kind::Predefined: return "predefined:" + index_file;
  }
  return "none";
}

SamplingPolicy SamplingPolicy::parse(std::string_view s) {
  if (s == "none") return none();
  const auto colon = s.find(':');
  const auto head = s.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : s.substr(colon + 1);
  if (head == "uniform") return uniform(parse_count(arg, "sampling"));
  if (head == "fraction") return fraction(parse_real(arg, "sampling"));
  if (head == "predefined") return from_file(std::string(arg));
  throw ConfigError("unknown sampling policy '" + std::string(s) + "'");
}

void ModelConfig::validate(std::size_t input_len) const {
  std::size_t width = input_len;
  auto check_layer = [&](const LayerConfig& layer, std::string_view where, std::size_t in) {
    if (layer.mlp.empty()) throw ConfigError(std::string(where) + ": empty MLP");
    if (layer.mlp.front().in != in) {
      throw ConfigError(std::string(where) + ": MLP expects input width " +
                        std::to_string(layer.mlp.front().in) + ", got " + std::to_string(in));
    }
    for (std::size_t i = 0; i < layer.mlp.size(); ++i) {
      if (layer.mlp[i].in == 0 || layer.mlp[i].out == 0) {
        throw ConfigError(std::string(where) + ": zero-sized MLP shape");
      }
      if (i + 1 < layer.mlp.size() && layer.mlp[i].out != layer.mlp[i + 1].in) {
        throw ConfigError(std::string(where) + ": MLP shapes do not compose at stage " +
                          std::to_string(i));
      }
    }
    if (layer.sampling.kind == SamplingPolicy::Kind::Uniform && layer.sampling.k < 1) {
      throw ConfigError(std::string(where) + ": uniform sampling requires k >= 1");
    }
    return layer.output_len();
  };
  for (std::size_t i = 0; i < layers.size(); ++i) {
    width = check_layer(layers[i], "layer " + std::to_string(i), width);
  }
  if (pool) {
    check_layer(pool->pool, "pool", width);
    check_layer(pool->embedding, "embedding", width);
  }
  if (layers.empty() && !pool) throw ConfigError("model has no layers");
}

ModelConfig gcn_model(std::size_t input_len, std::size_t hidden, std::size_t layers) {
  ModelConfig m;
  m.name = "gcn";
  for (std::size_t i = 0; i < layers; ++i) {
    m.layers.push_back(gcn_layer(i == 0 ? input_len : hidden, hidden, AggregateFn::WeightedAdd));
  }
  return m;
}

ModelConfig graphsage_model(std::size_t input_len, std::size_t hidden, std::size_t layers,
                            std::size_t samples) {
  ModelConfig m;
  m.name = "gsc";
  for (std::size_t i = 0; i < layers; ++i) {
    auto layer = gcn_layer(i == 0 ? input_len : hidden, hidden, AggregateFn::Max);
    layer.sampling = SamplingPolicy::uniform(samples);
    m.layers.push_back(layer);
  }
  return m;
}

ModelConfig gin_model(std::size_t input_len, std::size_t hidden, std::size_t layers) {
  ModelConfig m;
  m.name = "gin";
  for (std::size_t i = 0; i < layers; ++i) {
    LayerConfig layer;
    layer.aggregate = AggregateFn::Add;
    layer.epsilon = 0.0;
    layer.mlp = {{i == 0 ? input_len : hidden, hidden}, {hidden, hidden}};
    m.layers.push_back(layer);
  }
  return m;
}

ModelConfig diffpool_model(std::size_t input_len, std::size_t clusters, std::size_t embedding) {
  ModelConfig m;
  m.name = "dfp";
  m.pool = DiffPoolConfig{gcn_layer(input_len, clusters, AggregateFn::Min),
                          gcn_layer(input_len, embedding, AggregateFn::Min)};
  return m;
}

ModelConfig model_preset(std::string_view name, std::size_t input_len) {
  if (name == "gcn") return gcn_model(input_len);
  if (name == "gsc" || name == "graphsage") return graphsage_model(input_len);
  if (name == "gin") return gin_model(input_len);
  if (name == "dfp" || name == "diffpool") return diffpool_model(input_len);
  throw ConfigError("unknown model preset '" + std::string(name) + "'");
}

void SystemConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw ConfigError(std::string(name) + " must be >= 1");
  };
  positive(simd_cores, "simd_cores");
  positive(simd_width, "simd_width");
  positive(systolic_modules, "systolic_modules");
  positive(module_rows, "module_rows");
  positive(module_cols, "module_cols");
  positive(modules_per_group, "modules_per_group");
  positive(edge_buffer_bytes, "edge_buffer_bytes");
  positive(input_buffer_bytes, "input_buffer_bytes");
  positive(weight_buffer_bytes, "weight_buffer_bytes");
  positive(output_buffer_bytes, "output_buffer_bytes");
  positive(agg_buffer_bytes, "agg_buffer_bytes");
  positive(channel_bytes_per_cycle, "channel_bytes_per_cycle");
  positive(edge_record_bytes, "edge_record_bytes");
  for (auto [v, name] : {std::pair{dram_channels, "dram_channels"},
                         std::pair{dram_banks, "dram_banks"},
                         std::pair{row_buffer_bytes, "row_buffer_bytes"}}) {
    if (v == 0 || !std::has_single_bit(v)) {
      throw ConfigError(std::string(name) + " must be a power of two, got " + std::to_string(v));
    }
  }
  if (systolic_modules % modules_per_group != 0) {
    throw ConfigError("modules_per_group (" + std::to_string(modules_per_group) +
                      ") must divide systolic_modules (" + std::to_string(systolic_modules) + ")");
  }
  for (double e : {pj_per_dram_bit, pj_per_mac, pj_per_simd_op, pj_per_edge_buffer_byte,
                   pj_per_input_buffer_byte, pj_per_weight_buffer_byte, pj_per_output_buffer_byte,
                   pj_per_agg_buffer_byte}) {
    if (!(e >= 0.0)) throw ConfigError("energy constants must be non-negative");
  }
}

SystemConfig SystemConfig::desk_scale() {
  SystemConfig s;
  s.input_buffer_bytes = 32u << 10;
  s.edge_buffer_bytes = 128u << 10;
  s.output_buffer_bytes = 256u << 10;
  s.agg_buffer_bytes = 256u << 10;
  return s;
}

const std::vector<ConfigField>& system_config_schema() {
  using S = SystemConfig;
  auto count = [](std::string key, std::string help, auto member) {
    return ConfigField{
        key, std::move(help), false,
        [member, key](S& s, std::string_view v) { s.*member = parse_count(v, key); },
        [member](const S& s) { return std::to_string(s.*member); }};
  };
  auto cycles = [](std::string key, std::string help, uint64_t S::*member) {
    return ConfigField{
        key, std::move(help), false,
        [member, key](S& s, std::string_view v) { s.*member = parse_count(v, key); },
        [member](const S& s) { return std::to_string(s.*member); }};
  };
  auto real = [](std::string key, std::string help, double S::*member) {
    return ConfigField{key, std::move(help), false,
                       [member, key](S& s, std::string_view v) { s.*member = parse_real(v, key); },
                       [member](const S& s) { return format_real(s.*member); }};
  };
  auto flag = [](std::string key, std::string help, bool S::*member) {
    return ConfigField{key, std::move(help), true,
                       [member, key](S& s, std::string_view v) { s.*member = parse_bool(v, key); },
                       [member](const S& s) { return std::string(s.*member ? "true" : "false"); }};
  };
  static const std::vector<ConfigField> schema = {
      count("simd_cores", "SIMD cores in the aggregation engine", &S::simd_cores),
      count("simd_width", "lanes per SIMD core", &S::simd_width),
      flag("vertex_concentrated", "assign each vertex to a single SIMD core", &S::vertex_concentrated),
      count("systolic_modules", "systolic modules in the combination engine", &S::systolic_modules),
      count("module_rows", "PE rows per systolic module", &S::module_rows),
      count("module_cols", "PE columns per systolic module", &S::module_cols),
      count("modules_per_group", "modules merged into one cooperative group", &S::modules_per_group),
      count("edge_buffer_bytes", "edge buffer capacity", &S::edge_buffer_bytes),
      count("input_buffer_bytes", "input feature buffer capacity", &S::input_buffer_bytes),
      count("weight_buffer_bytes", "weight buffer capacity", &S::weight_buffer_bytes),
      count("output_buffer_bytes", "output buffer capacity", &S::output_buffer_bytes),
      count("agg_buffer_bytes", "aggregation buffer capacity", &S::agg_buffer_bytes),
      count("dram_channels", "DRAM channels (power of two)", &S::dram_channels),
      count("dram_banks", "banks per channel (power of two)", &S::dram_banks),
      count("row_buffer_bytes", "row buffer size (power of two)", &S::row_buffer_bytes),
      count("channel_bytes_per_cycle", "per-channel bandwidth", &S::channel_bytes_per_cycle),
      cycles("row_hit_cycles", "row-buffer hit latency", &S::row_hit_cycles),
      cycles("row_miss_cycles", "row-buffer miss latency (precharge + activate)",
             &S::row_miss_cycles),
      count("edge_record_bytes", "bytes per edge record", &S::edge_record_bytes),
      count("coefficient_bytes", "extra bytes per edge for normalization coefficients",
            &S::coefficient_bytes),
      real("pj_per_dram_bit", "DRAM energy per bit", &S::pj_per_dram_bit),
      real("pj_per_mac", "systolic MAC energy", &S::pj_per_mac),
      real("pj_per_simd_op", "SIMD element-op energy", &S::pj_per_simd_op),
      real("pj_per_edge_buffer_byte", "edge buffer access energy", &S::pj_per_edge_buffer_byte),
      real("pj_per_input_buffer_byte", "input buffer access energy", &S::pj_per_input_buffer_byte),
      real("pj_per_weight_buffer_byte", "weight buffer access energy",
           &S::pj_per_weight_buffer_byte),
      real("pj_per_output_buffer_byte", "output buffer access energy",
           &S::pj_per_output_buffer_byte),
      real("pj_per_agg_buffer_byte", "aggregation buffer access energy",
           &S::pj_per_agg_buffer_byte),
      ConfigField{"pipeline", "inter-engine pipeline: latency, energy or none", false,
                  [](S& s, std::string_view v) { s.pipeline_mode = parse_pipeline_mode(v); },
                  [](const S& s) { return std::string(to_string(s.pipeline_mode)); }},
      flag("coordination", "priority-ordered off-chip access coordination",
           &S::coordination_enabled),
      flag("sparsity_elimination", "window sliding/shrinking sparsity elimination",
           &S::sparsity_elimination_enabled),
  };
  return schema;
}

}  // namespace gcnsim
