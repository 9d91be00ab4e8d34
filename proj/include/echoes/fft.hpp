// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "echoes/fxp.hpp"
#include "echoes/memory.hpp"
#include "echoes/schedule.hpp"

namespace echoes {

using cplx = std::complex<double>;

std::uint32_t bit_reverse_index(std::uint32_t i, int log2n);

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
int log2_exact(std::size_t n);

/// One lookup table per data type, holding exp(-2*pi*i*k/N_max) for
/// k < N_max/2. Smaller transforms index it with stride N_max/n.
class TwiddleTable {
 public:
  explicit TwiddleTable(DataType dtype);

  DataType dtype() const { return dtype_; }
  std::size_t size() const { return entries_.size(); }
  const FixedComplex& entry(std::size_t k) const { return entries_.at(k); }
  FixedComplex lookup(std::size_t n_points, std::size_t k) const;

  /// Shared immutable table for `dtype`.
  static const TwiddleTable& get(DataType dtype);

 private:
  DataType dtype_;
  std::vector<FixedComplex> entries_;
};

inline FixedComplex twiddle_lookup(const TwiddleTable& table, std::size_t n_points, std::size_t k) {
  return table.lookup(n_points, k);
}

/// The in-place stage order used everywhere: natural-order input,
/// bit-reversed output. Stage s pairs samples `span(n, s)` apart and block b
/// of that stage uses twiddle exponent bit_reverse(b, log2(n)-1).
constexpr std::uint32_t stage_span(std::uint32_t n_points, int stage) { return n_points >> (stage + 1); }
std::uint32_t stage_twiddle_exponent(std::uint32_t n_points, int stage, std::uint32_t sample_index);

// Double-precision oracles, forward sign exp(-2*pi*i*k*n/N).
std::vector<cplx> dft_direct(std::span<const cplx> x);
std::vector<cplx> fft_recursive(std::span<const cplx> x);
/// Direct summation up to 256 points, recursive FFT above.
std::vector<cplx> fft_reference(std::span<const cplx> x);

/// Fixed-point FFT with exactly the accelerator's arithmetic and twiddles
/// but none of its memory scheduling. Natural-order output.
std::vector<FixedComplex> fft_fixed_direct(std::span<const FixedComplex> x, ScalingPolicy policy,
                                           bool* overflow = nullptr);

struct FftJob {
  std::uint32_t n_points = 0;
  DataType dtype = DataType::C64;
  std::uint32_t base_address = 0;
  ScalingPolicy scaling = ScalingPolicy::DivideByTwoPerStage;
  ReorderPolicy reorder = ReorderPolicy::BankAware;
};

/// Base addresses must be a multiple of one port group (4 words).
inline constexpr std::uint32_t kBaseAlignmentWords = 4;

/// Throws ConfigError when the job cannot run against `memory_words`.
void validate_job(const FftJob& job, std::size_t memory_words);

struct FftResultSummary {
  CycleStats stats;
  bool overflow = false;
  int scaling_stages = 0;  // output = DFT / 2^scaling_stages
  std::size_t max_register_words = 0;  // peak occupancy of either register set
};

/// Runs the accelerator cycle by cycle against `memory`. The spectrum
/// replaces the input in natural order.
FftResultSummary fft_fixed(const FftJob& job, BankedMemory& memory);

}  // namespace echoes
