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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gcnsim {

// Config files are flat "key = value" lines; '#' starts a comment.

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

std::vector<KeyValue> parse_key_values(std::istream& in);

/// Sets one system field by schema key. Unknown keys are a ConfigError.
void apply_system_setting(SystemConfig& sys, std::string_view key, std::string_view value);

SystemConfig parse_system_config(std::istream& in, SystemConfig base = SystemConfig::full_scale());
SystemConfig load_system_config(const std::filesystem::path& path,
                                SystemConfig base = SystemConfig::full_scale());
void write_system_config(std::ostream& out, const SystemConfig& sys);

/// "512x128,128x128".
std::vector<MlpShape> parse_mlp(std::string_view s);
std::string format_mlp(const std::vector<MlpShape>& shapes);

// Model files either start from a preset ("preset = gcn", with optional
// hidden / num_layers / samples / clusters) or list layers explicitly:
//
//   layer.0.aggregate = weighted_add
//   layer.0.mlp = 512x128
//   layer.0.sampling = uniform:25
//   pool.pool.mlp = 128x16
//
// Layer keys: aggregate, include_self, epsilon, augment_degree, mlp,
// activation, sampling, order.
ModelConfig parse_model_config(std::istream& in, std::size_t input_len);
ModelConfig load_model_config(const std::filesystem::path& path, std::size_t input_len);
void write_model_config(std::ostream& out, const ModelConfig& model);

}  // namespace gcnsim
