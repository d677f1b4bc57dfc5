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

#include "gcnsim/config_io.hpp"

#include "gcnsim/error.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace gcnsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_count(std::string_view s, std::string_view key) {
  std::size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a non-negative integer");
  }
  return v;
}

double to_real(std::string_view s, std::string_view key) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a number");
  }
  return v;
}

bool to_bool(std::string_view s, std::string_view key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false");
}

void set_layer_field(LayerConfig& layer, std::string_view field, std::string_view value,
                     std::string_view key) {
  if (field == "aggregate") {
    layer.aggregate = parse_aggregate_fn(value);
  } else if (field == "include_self") {
    layer.include_self = to_bool(value, key);
  } else if (field == "epsilon") {
    layer.epsilon = to_real(value, key);
  } else if (field == "augment_degree") {
    layer.augment_degree = to_bool(value, key);
  } else if (field == "mlp") {
    layer.mlp = parse_mlp(value);
  } else if (field == "activation") {
    layer.activation = parse_activation(value);
  } else if (field == "sampling") {
    layer.sampling = SamplingPolicy::parse(value);
  } else if (field == "order") {
    layer.order = parse_layer_order(value);
  } else {
    throw ConfigError("unknown layer key '" + std::string(key) + "'");
  }
}

std::string format_real(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_layer(std::ostream& out, const std::string& prefix, const LayerConfig& layer) {
  out << prefix << "aggregate = " << to_string(layer.aggregate) << '\n'
      << prefix << "include_self = " << (layer.include_self ? "true" : "false") << '\n'
      << prefix << "epsilon = " << format_real(layer.epsilon) << '\n'
      << prefix << "augment_degree = " << (layer.augment_degree ? "true" : "false") << '\n'
      << prefix << "mlp = " << format_mlp(layer.mlp) << '\n'
      << prefix << "activation = " << to_string(layer.activation) << '\n'
      << prefix << "sampling = " << layer.sampling.describe() << '\n'
      << prefix << "order = " << to_string(layer.order) << '\n';
}

template <typename Fn>
void with_line(const KeyValue& kv, Fn&& fn) {
  try {
    fn();
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()) + " (line " + std::to_string(kv.line) + ")");
  }
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::istream& in) {
  std::vector<KeyValue> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    KeyValue kv{std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))),
                line_no};
    if (kv.key.empty()) throw ParseError("empty key", line_no);
    out.push_back(std::move(kv));
  }
  return out;
}

void apply_system_setting(SystemConfig& sys, std::string_view key, std::string_view value) {
  for (const auto& field : system_config_schema()) {
    if (field.key == key) {
      field.set(sys, value);
      return;
    }
  }
  throw ConfigError("unknown system key '" + std::string(key) + "'");
}

SystemConfig parse_system_config(std::istream& in, SystemConfig base) {
  for (const auto& kv : parse_key_values(in)) {
    with_line(kv, [&] { apply_system_setting(base, kv.key, kv.value); });
  }
  base.validate();
  return base;
}

SystemConfig load_system_config(const std::filesystem::path& path, SystemConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open system config " + path.string());
  return parse_system_config(in, base);
}

void write_system_config(std::ostream& out, const SystemConfig& sys) {
  for (const auto& field : system_config_schema()) {
    out << field.key << " = " << field.get(sys) << '\n';
  }
}

std::vector<MlpShape> parse_mlp(std::string_view s) {
  std::vector<MlpShape> shapes;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    const auto item = trim(s.substr(pos, comma - pos));
    const auto x = item.find('x');
    if (x == std::string_view::npos) {
      throw ConfigError("MLP stage '" + std::string(item) + "' is not INxOUT");
    }
    shapes.push_back({to_count(trim(item.substr(0, x)), "mlp"), to_count(trim(item.substr(x + 1)), "mlp")});
    pos = comma + 1;
  }
  return shapes;
}

std::string format_mlp(const std::vector<MlpShape>& shapes) {
  std::string s;
  for (const auto& shape : shapes) {
    if (!s.empty()) s += ',';
    s += std::to_string(shape.in) + "x" + std::to_string(shape.out);
  }
  return s;
}

ModelConfig parse_model_config(std::istream& in, std::size_t input_len) {
  const auto entries = parse_key_values(in);
  std::map<std::string, std::string> preset_args;
  for (const auto& key : {"preset", "hidden", "num_layers", "samples", "clusters", "embedding"}) {
    preset_args[key] = "";
  }
  for (const auto& kv : entries) {
    if (auto it = preset_args.find(kv.key); it != preset_args.end()) it->second = kv.value;
  }

  ModelConfig model;
  if (const auto& name = preset_args["preset"]; !name.empty()) {
    auto arg = [&](const char* key, std::size_t fallback) {
      const auto& v = preset_args[key];
      return v.empty() ? fallback : to_count(v, key);
    };
    const std::size_t hidden = arg("hidden", 128);
    const std::size_t layers = arg("num_layers", 2);
    if (name == "gcn") {
      model = gcn_model(input_len, hidden, layers);
    } else if (name == "gsc" || name == "graphsage") {
      model = graphsage_model(input_len, hidden, layers, arg("samples", 25));
    } else if (name == "gin") {
      model = gin_model(input_len, hidden, layers);
    } else if (name == "dfp" || name == "diffpool") {
      model = diffpool_model(input_len, arg("clusters", 128), arg("embedding", 128));
    } else {
      throw ConfigError("unknown model preset '" + name + "'");
    }
  }

  for (const auto& kv : entries) {
    if (preset_args.count(kv.key)) continue;
    with_line(kv, [&] {
      std::string_view key = kv.key;
      if (key == "name") {
        model.name = kv.value;
      } else if (key == "weight_seed") {
        model.weight_seed = to_count(kv.value, key);
      } else if (key.starts_with("layer.")) {
        const auto rest = key.substr(6);
        const auto dot = rest.find('.');
        if (dot == std::string_view::npos) throw ConfigError("malformed key '" + kv.key + "'");
        const std::size_t index = to_count(rest.substr(0, dot), key);
        if (index > model.layers.size()) {
          throw ConfigError("layer " + std::to_string(index) + " defined before layer " +
                            std::to_string(model.layers.size()));
        }
        if (index == model.layers.size()) model.layers.emplace_back();
        set_layer_field(model.layers[index], rest.substr(dot + 1), kv.value, key);
      } else if (key.starts_with("pool.")) {
        if (!model.pool) model.pool.emplace();
        const auto rest = key.substr(5);
        if (rest.starts_with("pool.")) {
          set_layer_field(model.pool->pool, rest.substr(5), kv.value, key);
        } else if (rest.starts_with("embedding.")) {
          set_layer_field(model.pool->embedding, rest.substr(10), kv.value, key);
        } else {
          throw ConfigError("unknown pool key '" + kv.key + "'");
        }
      } else {
        throw ConfigError("unknown model key '" + kv.key + "'");
      }
    });
  }
  model.validate(input_len);
  return model;
}

ModelConfig load_model_config(const std::filesystem::path& path, std::size_t input_len) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model config " + path.string());
  return parse_model_config(in, input_len);
}

void write_model_config(std::ostream& out, const ModelConfig& model) {
  out << "name = " << model.name << '\n' << "weight_seed = " << model.weight_seed << '\n';
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    write_layer(out, "layer." + std::to_string(l) + ".", model.layers[l]);
  }
  if (model.pool) {
    write_layer(out, "pool.pool.", model.pool->pool);
    write_layer(out, "pool.embedding.", model.pool->embedding);
  }
}

}  // namespace gcnsim
