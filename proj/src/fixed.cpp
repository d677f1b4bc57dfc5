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

#include "gcnsim/fixed.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gcnsim {

Fixed32 Fixed32::from_double(double value) {
  if (std::isnan(value)) throw std::domain_error("Fixed32: NaN is not representable");
  const double scaled = value * kOneRaw;
  if (scaled >= static_cast<double>(kMaxRaw)) return max();
  if (scaled <= static_cast<double>(kMinRaw)) return lowest();
  // std::round rounds halfway cases away from zero.
  return from_raw(static_cast<int32_t>(std::round(scaled)));
}

namespace {

__int128 round_div(__int128 num, __int128 den) {
  __int128 q = num / den;
  const __int128 r = num % den;
  const __int128 ar = r < 0 ? -r : r;
  const __int128 ad = den < 0 ? -den : den;
  if (2 * ar >= ad) q += ((num < 0) == (den < 0)) ? 1 : -1;
  return q;
}

int64_t clamp64(__int128 v) {
  if (v > std::numeric_limits<int64_t>::max()) return std::numeric_limits<int64_t>::max();
  if (v < std::numeric_limits<int64_t>::min()) return std::numeric_limits<int64_t>::min();
  return static_cast<int64_t>(v);
}

}  // namespace

Fixed32 operator/(Fixed32 a, Fixed32 b) {
  if (b.raw() == 0) throw std::domain_error("Fixed32: division by zero");
  const __int128 num = static_cast<__int128>(a.raw()) << Fixed32::kFracBits;
  return Fixed32::saturate(clamp64(round_div(num, b.raw())));
}

Fixed32 divide_raw(int64_t raw_sum, int64_t count) {
  if (count <= 0) throw std::domain_error("divide_raw: count must be positive");
  return Fixed32::saturate(clamp64(round_div(raw_sum, count)));
}

std::ostream& operator<<(std::ostream& out, Fixed32 v) { return out << v.to_double(); }

std::optional<std::pair<Eigen::Index, Eigen::Index>> first_mismatch(const FeatureMatrix& a,
                                                                    const FeatureMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::pair{std::min(a.rows(), b.rows()), std::min(a.cols(), b.cols())};
  }
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (a(r, c) != b(r, c)) return std::pair{r, c};
    }
  }
  return std::nullopt;
}

}  // namespace gcnsim
