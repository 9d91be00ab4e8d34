// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>

namespace echoes {

/// Complex fixed-point formats supported by the accelerator. The name gives
/// the total width of one complex sample (real + imaginary).
enum class DataType { C64, C32, C16 };

/// Bits per real/imaginary part.
constexpr int part_width(DataType t) {
  switch (t) {
    case DataType::C64: return 32;
    case DataType::C32: return 16;
    case DataType::C16: return 8;
  }
  return 0;
}

/// Largest FFT the accelerator accepts for the given format.
constexpr std::size_t max_points(DataType t) {
  switch (t) {
    case DataType::C64: return 512;
    case DataType::C32: return 1024;
    case DataType::C16: return 2048;
  }
  return 0;
}

/// Butterflies the butterfly unit retires per cycle (one C64 engine, one C32
/// engine and two C16 engines, with wider engines reused for narrow data).
constexpr int butterflies_per_cycle(DataType t) {
  switch (t) {
    case DataType::C64: return 1;
    case DataType::C32: return 2;
    case DataType::C16: return 4;
  }
  return 0;
}

std::string_view to_string(DataType t);
DataType parse_data_type(std::string_view name);

/// Q1.(w-1) complex sample; raw parts are stored sign-extended in 32 bits.
struct FixedComplex {
  std::int32_t re = 0;
  std::int32_t im = 0;
  DataType dtype = DataType::C64;

  friend bool operator==(const FixedComplex&, const FixedComplex&) = default;
};

enum class ScalingPolicy { DivideByTwoPerStage, None };

std::string_view to_string(ScalingPolicy p);
ScalingPolicy parse_scaling(std::string_view name);

using wide_int = __int128;

constexpr std::int64_t raw_max(int width) { return (std::int64_t{1} << (width - 1)) - 1; }
constexpr std::int64_t raw_min(int width) { return -(std::int64_t{1} << (width - 1)); }

/// Drops `shift` fractional bits with round-to-nearest, ties-to-even, then
/// saturates to a signed `width`-bit range. Sets `*overflow` when clipping.
std::int64_t sat_round(wide_int value, int shift, int width, bool* overflow = nullptr);

FixedComplex cmul(const FixedComplex& a, const FixedComplex& b, bool* overflow = nullptr);

/// Radix-2 DIT butterfly: t = w*b, returns (a + t, a - t), halved under
/// DivideByTwoPerStage.
std::pair<FixedComplex, FixedComplex> butterfly(const FixedComplex& a, const FixedComplex& b,
                                                const FixedComplex& w, ScalingPolicy policy,
                                                bool* overflow = nullptr);

FixedComplex quantize(std::complex<double> x, DataType dtype);
std::complex<double> dequantize(const FixedComplex& x);

/// Largest positive real value, the format's stand-in for 1.0.
FixedComplex unity(DataType dtype);

/// Weight of one least significant bit.
constexpr double ulp(DataType t) { return 1.0 / static_cast<double>(std::int64_t{1} << (part_width(t) - 1)); }

}  // namespace echoes
