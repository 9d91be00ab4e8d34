// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "echoes/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <tuple>

#include "echoes/errors.hpp"

namespace echoes {

std::uint32_t bit_reverse_index(std::uint32_t i, int log2n) {
  if (log2n < 0 || log2n > 31) throw UsageError("bit_reverse_index: bad bit count");
  if (log2n < 32 && i >= (std::uint64_t{1} << log2n)) throw UsageError("bit_reverse_index: index out of range");
  std::uint32_t r = 0;
  for (int b = 0; b < log2n; ++b) {
    r = (r << 1) | ((i >> b) & 1u);
  }
  return r;
}

int log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) throw UsageError("length " + std::to_string(n) + " is not a power of two");
  int l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

TwiddleTable::TwiddleTable(DataType dtype) : dtype_(dtype) {
  const std::size_t n_max = max_points(dtype);
  entries_.reserve(n_max / 2);
  for (std::size_t k = 0; k < n_max / 2; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_max);
    entries_.push_back(quantize(std::polar(1.0, angle), dtype));
  }
}

FixedComplex TwiddleTable::lookup(std::size_t n_points, std::size_t k) const {
  const std::size_t n_max = max_points(dtype_);
  if (!is_power_of_two(n_points) || n_points < 2 || n_points > n_max) {
    throw UsageError("twiddle_lookup: unsupported size " + std::to_string(n_points));
  }
  if (k >= n_points / 2) throw UsageError("twiddle_lookup: exponent out of range");
  return entries_[k * (n_max / n_points)];
}

const TwiddleTable& TwiddleTable::get(DataType dtype) {
  static const TwiddleTable c64(DataType::C64);
  static const TwiddleTable c32(DataType::C32);
  static const TwiddleTable c16(DataType::C16);
  switch (dtype) {
    case DataType::C64: return c64;
    case DataType::C32: return c32;
    case DataType::C16: return c16;
  }
  return c64;
}

std::uint32_t stage_twiddle_exponent(std::uint32_t n_points, int stage, std::uint32_t sample_index) {
  const int log2n = log2_exact(n_points);
  const std::uint32_t block = sample_index / (2 * stage_span(n_points, stage));
  return bit_reverse_index(block, log2n - 1);
}

std::vector<cplx> dft_direct(std::span<const cplx> x) {
  const std::size_t n = x.size();
  log2_exact(n);
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce k*j mod n first so the angle stays small and exact.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
      acc += x[j] * std::polar(1.0, angle);
    }
    out[k] = acc;
  }
  return out;
}

namespace {

void fft_rec(std::span<const cplx> x, std::size_t stride, std::size_t n, cplx* out) {
  if (n == 1) {
    out[0] = x[0];
    return;
  }
  const std::size_t half = n / 2;
  fft_rec(x, stride * 2, half, out);
  fft_rec(x.subspan(stride), stride * 2, half, out + half);
  for (std::size_t k = 0; k < half; ++k) {
    const cplx w = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    const cplx e = out[k];
    const cplx o = w * out[k + half];
    out[k] = e + o;
    out[k + half] = e - o;
  }
}

}  // namespace

std::vector<cplx> fft_recursive(std::span<const cplx> x) {
  const std::size_t n = x.size();
  log2_exact(n);
  std::vector<cplx> out(n);
  fft_rec(x, 1, n, out.data());
  return out;
}

std::vector<cplx> fft_reference(std::span<const cplx> x) {
  return x.size() <= 256 ? dft_direct(x) : fft_recursive(x);
}

std::vector<FixedComplex> fft_fixed_direct(std::span<const FixedComplex> x, ScalingPolicy policy, bool* overflow) {
  const auto n = static_cast<std::uint32_t>(x.size());
  const int log2n = log2_exact(n);
  if (n < 2) return {x.begin(), x.end()};
  const DataType dtype = x.front().dtype;
  const auto& table = TwiddleTable::get(dtype);
  std::vector<FixedComplex> y(x.begin(), x.end());
  for (int s = 0; s < log2n; ++s) {
    const std::uint32_t h = stage_span(n, s);
    for (std::uint32_t i = 0; i < n; ++i) {
      if ((i / h) % 2 != 0) continue;
      const FixedComplex w = table.lookup(n, stage_twiddle_exponent(n, s, i));
      std::tie(y[i], y[i + h]) = butterfly(y[i], y[i + h], w, policy, overflow);
    }
  }
  std::vector<FixedComplex> out(n);
  for (std::uint32_t k = 0; k < n; ++k) out[k] = y[bit_reverse_index(k, log2n)];
  return out;
}

void validate_job(const FftJob& job, std::size_t memory_words) {
  if (!is_power_of_two(job.n_points) || job.n_points < 8) {
    throw ConfigError("n_points must be a power of two >= 8, got " + std::to_string(job.n_points));
  }
  if (job.n_points > max_points(job.dtype)) {
    throw ConfigError(std::string(to_string(job.dtype)) + " supports at most " +
                      std::to_string(max_points(job.dtype)) + " points, got " + std::to_string(job.n_points));
  }
  if (job.base_address % kBaseAlignmentWords != 0) {
    throw ConfigError("base_address must be a multiple of " + std::to_string(kBaseAlignmentWords) + " words");
  }
  if (std::size_t{job.base_address} + words_for(job.n_points, job.dtype) > memory_words) {
    throw ConfigError("sample array does not fit in memory");
  }
}

}  // namespace echoes
