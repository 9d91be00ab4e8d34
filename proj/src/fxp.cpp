// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "echoes/fxp.hpp"

#include <cmath>
#include <string>

#include "echoes/errors.hpp"

namespace echoes {

std::string_view to_string(DataType t) {
  switch (t) {
    case DataType::C64: return "C64";
    case DataType::C32: return "C32";
    case DataType::C16: return "C16";
  }
  return "?";
}

DataType parse_data_type(std::string_view name) {
  if (name == "C64" || name == "c64") return DataType::C64;
  if (name == "C32" || name == "c32") return DataType::C32;
  if (name == "C16" || name == "c16") return DataType::C16;
  throw ConfigError("unknown data type '" + std::string(name) + "'");
}

std::string_view to_string(ScalingPolicy p) {
  return p == ScalingPolicy::None ? "none" : "divide_by_two_per_stage";
}

ScalingPolicy parse_scaling(std::string_view name) {
  if (name == "none") return ScalingPolicy::None;
  if (name == "divide_by_two_per_stage" || name == "div2") return ScalingPolicy::DivideByTwoPerStage;
  throw ConfigError("unknown scaling policy '" + std::string(name) + "'");
}

std::int64_t sat_round(wide_int value, int shift, int width, bool* overflow) {
  wide_int q = value;
  if (shift > 0) {
    q = value >> shift;  // floor
    const wide_int rem = value - (q << shift);
    const wide_int half = wide_int{1} << (shift - 1);
    if (rem > half || (rem == half && (q & 1) != 0)) ++q;
  }
  const wide_int hi = raw_max(width);
  const wide_int lo = raw_min(width);
  if (q > hi || q < lo) {
    if (overflow) *overflow = true;
    return static_cast<std::int64_t>(q > hi ? hi : lo);
  }
  return static_cast<std::int64_t>(q);
}

FixedComplex cmul(const FixedComplex& a, const FixedComplex& b, bool* overflow) {
  if (a.dtype != b.dtype) throw UsageError("cmul: operand data types differ");
  const int w = part_width(a.dtype);
  const wide_int re = wide_int{a.re} * b.re - wide_int{a.im} * b.im;
  const wide_int im = wide_int{a.re} * b.im + wide_int{a.im} * b.re;
  return {static_cast<std::int32_t>(sat_round(re, w - 1, w, overflow)),
          static_cast<std::int32_t>(sat_round(im, w - 1, w, overflow)), a.dtype};
}

std::pair<FixedComplex, FixedComplex> butterfly(const FixedComplex& a, const FixedComplex& b,
                                                const FixedComplex& w, ScalingPolicy policy,
                                                bool* overflow) {
  if (a.dtype != b.dtype || a.dtype != w.dtype) throw UsageError("butterfly: operand data types differ");
  const int width = part_width(a.dtype);
  const int shift = policy == ScalingPolicy::DivideByTwoPerStage ? 1 : 0;
  const FixedComplex t = cmul(w, b, overflow);
  auto part = [&](std::int64_t x) {
    return static_cast<std::int32_t>(sat_round(x, shift, width, overflow));
  };
  const FixedComplex top{part(std::int64_t{a.re} + t.re), part(std::int64_t{a.im} + t.im), a.dtype};
  const FixedComplex bottom{part(std::int64_t{a.re} - t.re), part(std::int64_t{a.im} - t.im), a.dtype};
  return {top, bottom};
}

namespace {

std::int32_t quantize_part(double x, int width) {
  const double scaled = std::nearbyint(std::ldexp(x, width - 1));  // FE_TONEAREST: ties to even
  const double hi = static_cast<double>(raw_max(width));
  const double lo = static_cast<double>(raw_min(width));
  if (!(scaled <= hi)) return static_cast<std::int32_t>(std::isnan(scaled) ? 0 : raw_max(width));
  if (scaled < lo) return static_cast<std::int32_t>(raw_min(width));
  return static_cast<std::int32_t>(scaled);
}

}  // namespace

FixedComplex quantize(std::complex<double> x, DataType dtype) {
  const int w = part_width(dtype);
  return {quantize_part(x.real(), w), quantize_part(x.imag(), w), dtype};
}

std::complex<double> dequantize(const FixedComplex& x) {
  const int w = part_width(x.dtype);
  return {std::ldexp(static_cast<double>(x.re), -(w - 1)), std::ldexp(static_cast<double>(x.im), -(w - 1))};
}

FixedComplex unity(DataType dtype) {
  return {static_cast<std::int32_t>(raw_max(part_width(dtype))), 0, dtype};
}

}  // namespace echoes
