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

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <utility>

namespace gcnsim {

/// Q16.16 signed fixed point stored in 32 bits.
///
/// Addition and subtraction are exact integer operations that saturate at the
/// representable range. Multiplication and division round to nearest (ties
/// away from zero) on the dropped fractional bits, then saturate.
class Fixed32 {
 public:
  static constexpr int kFracBits = 16;
  static constexpr int32_t kOneRaw = int32_t{1} << kFracBits;
  static constexpr int32_t kMaxRaw = std::numeric_limits<int32_t>::max();
  static constexpr int32_t kMinRaw = std::numeric_limits<int32_t>::min();

  constexpr Fixed32() = default;
  // Integer value, so Eigen's Scalar(0) / Scalar(1) mean what they say.
  constexpr explicit Fixed32(int value) : raw_(saturate_raw(int64_t{value} << kFracBits)) {}

  static constexpr Fixed32 from_raw(int32_t raw) {
    Fixed32 f;
    f.raw_ = raw;
    return f;
  }
  static Fixed32 from_double(double value);
  static constexpr Fixed32 saturate(int64_t raw) { return from_raw(saturate_raw(raw)); }
  static constexpr Fixed32 max() { return from_raw(kMaxRaw); }
  static constexpr Fixed32 lowest() { return from_raw(kMinRaw); }

  constexpr int32_t raw() const { return raw_; }
  double to_double() const { return static_cast<double>(raw_) / kOneRaw; }

  friend constexpr Fixed32 operator+(Fixed32 a, Fixed32 b) {
    return saturate(int64_t{a.raw_} + int64_t{b.raw_});
  }
  friend constexpr Fixed32 operator-(Fixed32 a, Fixed32 b) {
    return saturate(int64_t{a.raw_} - int64_t{b.raw_});
  }
  friend constexpr Fixed32 operator-(Fixed32 a) { return saturate(-int64_t{a.raw_}); }
  friend constexpr Fixed32 operator*(Fixed32 a, Fixed32 b) {
    return saturate(round_shift(int64_t{a.raw_} * int64_t{b.raw_}, kFracBits));
  }
  friend Fixed32 operator/(Fixed32 a, Fixed32 b);

  Fixed32& operator+=(Fixed32 o) { return *this = *this + o; }
  Fixed32& operator-=(Fixed32 o) { return *this = *this - o; }
  Fixed32& operator*=(Fixed32 o) { return *this = *this * o; }
  Fixed32& operator/=(Fixed32 o) { return *this = *this / o; }

  friend constexpr auto operator<=>(Fixed32, Fixed32) = default;
  friend constexpr bool operator==(Fixed32, Fixed32) = default;

  /// Arithmetic shift right by `shift` bits, rounding to nearest with ties
  /// away from zero.
  static constexpr int64_t round_shift(int64_t value, int shift) {
    const int64_t half = int64_t{1} << (shift - 1);
    return value >= 0 ? (value + half) >> shift : -((-value + half) >> shift);
  }
  static constexpr int64_t round_shift(__int128 value, int shift) {
    const __int128 half = __int128{1} << (shift - 1);
    const __int128 r = value >= 0 ? (value + half) >> shift : -((-value + half) >> shift);
    return r > std::numeric_limits<int64_t>::max()   ? std::numeric_limits<int64_t>::max()
           : r < std::numeric_limits<int64_t>::min() ? std::numeric_limits<int64_t>::min()
                                                     : static_cast<int64_t>(r);
  }
  static constexpr int32_t saturate_raw(int64_t raw) {
    return raw > kMaxRaw ? kMaxRaw : raw < kMinRaw ? kMinRaw : static_cast<int32_t>(raw);
  }

 private:
  int32_t raw_ = 0;
};

}  // namespace gcnsim

namespace Eigen {

template <>
struct NumTraits<gcnsim::Fixed32> : GenericNumTraits<gcnsim::Fixed32> {
  using Real = gcnsim::Fixed32;
  using NonInteger = gcnsim::Fixed32;
  using Literal = gcnsim::Fixed32;
  using Nested = gcnsim::Fixed32;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 0,
    ReadCost = 1,
    AddCost = 1,
    MulCost = 3
  };

  static inline Real epsilon() { return gcnsim::Fixed32::from_raw(1); }
  static inline Real dummy_precision() { return gcnsim::Fixed32::from_raw(1); }
  static inline Real highest() { return gcnsim::Fixed32::max(); }
  static inline Real lowest() { return gcnsim::Fixed32::lowest(); }
  static inline int digits10() { return 4; }
  static inline int digits() { return 31; }
};

}  // namespace Eigen

namespace gcnsim {

/// Divides a wide raw accumulator by a positive integer count, rounding to
/// nearest (ties away from zero), then saturates.
Fixed32 divide_raw(int64_t raw_sum, int64_t count);

/// Prints the value as a decimal.
std::ostream& operator<<(std::ostream& out, Fixed32 v);

inline Fixed32 abs(Fixed32 v) { return v < Fixed32{} ? -v : v; }

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using FeatureMatrix = DenseMatrix<Fixed32>;
using FixedRow = RowVector<Fixed32>;

template <typename Derived>
FeatureMatrix quantize(const Eigen::MatrixBase<Derived>& m) {
  return m.template cast<double>().unaryExpr([](double v) { return Fixed32::from_double(v); });
}

inline DenseMatrix<double> dequantize(const FeatureMatrix& m) {
  return m.unaryExpr([](Fixed32 f) { return f.to_double(); });
}

/// First (row, col) where the raw values differ, or nullopt when bit-identical.
/// Shape mismatch is reported as (rows, cols) of the smaller extent.
std::optional<std::pair<Eigen::Index, Eigen::Index>> first_mismatch(const FeatureMatrix& a,
                                                                    const FeatureMatrix& b);

}  // namespace gcnsim
