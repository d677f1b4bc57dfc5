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

#include "gcnsim/graph.hpp"

#include <cstdint>

namespace gcnsim {

/// G(n, p) over ordered pairs u != v. Undirected graphs draw each unordered
/// pair once and store both directions.
CscGraph erdos_renyi(std::size_t n, double p, uint64_t seed, bool undirected = true);

/// Chung-Lu graph whose expected degrees follow a power law with exponent
/// `alpha` (> 1) and the given mean degree. Always undirected.
CscGraph power_law(std::size_t n, double alpha, double mean_degree, uint64_t seed);

/// Uniform features in [-1, 1), quantized to Q16.16.
FeatureMatrix random_features(std::size_t n, std::size_t feature_len, uint64_t seed);

}  // namespace gcnsim
