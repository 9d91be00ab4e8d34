// Copyright 2026 The echoes-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "echoes/errors.hpp"
#include "echoes/fft.hpp"

namespace echoes {
namespace {

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> x(n);
  for (auto& v : x) v = {u(rng), u(rng)};
  return x;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST(BitReverseTest, Examples) {
  EXPECT_EQ(bit_reverse_index(1, 3), 4u);
  EXPECT_EQ(bit_reverse_index(6, 3), 3u);
  EXPECT_EQ(bit_reverse_index(1, 9), 256u);
  EXPECT_EQ(bit_reverse_index(0, 0), 0u);
  EXPECT_THROW(bit_reverse_index(8, 3), UsageError);
}

TEST(BitReverseTest, Involution) {
  for (int bits = 1; bits <= 11; ++bits) {
    for (std::uint32_t i = 0; i < (1u << bits); ++i) ASSERT_EQ(bit_reverse_index(bit_reverse_index(i, bits), bits), i);
  }
}

TEST(Log2Test, ExactOnly) {
  EXPECT_EQ(log2_exact(2048), 11);
  EXPECT_THROW(log2_exact(48), UsageError);
  EXPECT_THROW(log2_exact(0), UsageError);
}

TEST(TwiddleTest, QuarterTurnIsMinusI) {
  for (auto t : {DataType::C64, DataType::C32, DataType::C16}) {
    const auto w = TwiddleTable::get(t).lookup(4, 1);
    EXPECT_NEAR(dequantize(w).real(), 0.0, ulp(t));
    EXPECT_NEAR(dequantize(w).imag(), -1.0, ulp(t));
  }
  EXPECT_EQ(TwiddleTable::get(DataType::C64).lookup(8, 0), unity(DataType::C64));
}

TEST(TwiddleTest, WithinOneUlpOfExact) {
  for (auto t : {DataType::C64, DataType::C32, DataType::C16}) {
    const auto& table = TwiddleTable::get(t);
    const std::size_t n = max_points(t);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const long double a = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) / n;
      const auto w = dequantize(table.lookup(n, k));
      // The rail at +1.0 sits one ulp below the exact value.
      const double tol = 1.0 * ulp(t);
      ASSERT_NEAR(w.real(), static_cast<double>(std::cos(a)), tol) << k;
      ASSERT_NEAR(w.imag(), static_cast<double>(std::sin(a)), tol) << k;
    }
  }
}

TEST(TwiddleTest, SharedTableAcrossSizes) {
  const auto& table = TwiddleTable::get(DataType::C32);
  for (std::size_t n = 8; n <= 1024; n *= 2) {
    for (std::size_t k = 0; k < n / 2; ++k) ASSERT_EQ(table.lookup(n, k), table.entry(k * (1024 / n)));
  }
  EXPECT_THROW(table.lookup(2048, 0), UsageError);
  EXPECT_THROW(table.lookup(16, 8), UsageError);
}

TEST(StageTest, SpanAndExponent) {
  EXPECT_EQ(stage_span(8, 0), 4u);
  EXPECT_EQ(stage_span(8, 2), 1u);
  // Last stage of N=8: blocks 0..3 use exponents bitrev(b, 2).
  EXPECT_EQ(stage_twiddle_exponent(8, 2, 0), 0u);
  EXPECT_EQ(stage_twiddle_exponent(8, 2, 2), 2u);
  EXPECT_EQ(stage_twiddle_exponent(8, 2, 4), 1u);
  EXPECT_EQ(stage_twiddle_exponent(8, 2, 6), 3u);
  EXPECT_EQ(stage_twiddle_exponent(8, 0, 3), 0u);
}

TEST(ReferenceTest, ImpulseIsFlat) {
  std::vector<cplx> x(16);
  x[0] = 1.0;
  for (const auto& v : fft_reference(x)) EXPECT_NEAR(std::abs(v - cplx{1.0, 0.0}), 0.0, 1e-15);
}

TEST(ReferenceTest, OnesConcentrateInBinZero) {
  std::vector<cplx> x(32, cplx{1.0, 0.0});
  const auto y = fft_reference(x);
  EXPECT_NEAR(y[0].real(), 32.0, 1e-12);
  for (std::size_t k = 1; k < 32; ++k) EXPECT_LT(std::abs(y[k]), 1e-12);
}

TEST(ReferenceTest, ToneLandsInItsBin) {
  const std::size_t n = 64;
  std::vector<cplx> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = std::polar(1.0, 2.0 * std::numbers::pi * 13.0 * j / n);
  const auto y = fft_reference(x);
  EXPECT_NEAR(std::abs(y[13]), 64.0, 1e-10);
  for (std::size_t k = 0; k < n; ++k) {
    if (k != 13) {
      EXPECT_LT(std::abs(y[k]), 1e-10);
    }
  }
}

TEST(ReferenceTest, DirectMatchesRecursive) {
  for (std::size_t n = 2; n <= 1024; n *= 2) {
    const auto x = random_signal(n, n);
    EXPECT_LT(max_abs_diff(dft_direct(x), fft_recursive(x)), 1e-9) << n;
  }
}

TEST(ReferenceTest, Linearity) {
  const auto a = random_signal(128, 1), b = random_signal(128, 2);
  std::vector<cplx> s(128);
  const cplx alpha{0.3, -0.7};
  for (std::size_t i = 0; i < 128; ++i) s[i] = alpha * a[i] + b[i];
  const auto fa = fft_reference(a), fb = fft_reference(b), fs = fft_reference(s);
  for (std::size_t i = 0; i < 128; ++i) EXPECT_LT(std::abs(fs[i] - (alpha * fa[i] + fb[i])), 1e-10);
}

TEST(ReferenceTest, Parseval) {
  for (std::size_t n : {8u, 256u, 2048u}) {
    const auto x = random_signal(n, 7 * n);
    const auto y = fft_reference(x);
    double ex = 0, ey = 0;
    for (auto v : x) ex += std::norm(v);
    for (auto v : y) ey += std::norm(v);
    EXPECT_NEAR(ey / static_cast<double>(n), ex, 1e-9 * ex);
  }
}

TEST(FixedDirectTest, TracksReferenceOverN) {
  for (auto t : {DataType::C64, DataType::C32, DataType::C16}) {
    for (std::size_t n = 8; n <= max_points(t); n *= 2) {
      auto x = random_signal(n, n + 3);
      std::vector<FixedComplex> q;
      for (auto& v : x) {
        v *= 0.5;
        q.push_back(quantize(v, t));
        v = dequantize(q.back());
      }
      bool overflow = false;
      const auto y = fft_fixed_direct(q, ScalingPolicy::DivideByTwoPerStage, &overflow);
      EXPECT_FALSE(overflow);
      const auto ref = fft_reference(x);
      // Each stage adds at most about one ulp of rounding and twiddle error.
      const double bound = (std::log2(static_cast<double>(n)) + 2.0) * 2.0 * ulp(t);
      double worst = 0;
      for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(dequantize(y[k]) - ref[k] / double(n)));
      EXPECT_LT(worst, bound) << to_string(t) << " " << n;
    }
  }
}

TEST(ValidateJobTest, Rejections) {
  const std::size_t mem = BankedMemory::kDefaultWords;
  EXPECT_NO_THROW(validate_job({512, DataType::C64}, mem));
  EXPECT_NO_THROW(validate_job({2048, DataType::C16, 4}, mem));
  EXPECT_THROW(validate_job({1024, DataType::C64}, mem), ConfigError);
  EXPECT_THROW(validate_job({4096, DataType::C16}, mem), ConfigError);
  EXPECT_THROW(validate_job({96, DataType::C32}, mem), ConfigError);
  EXPECT_THROW(validate_job({4, DataType::C32}, mem), ConfigError);
  EXPECT_THROW(validate_job({64, DataType::C32, 2}, mem), ConfigError);
  EXPECT_THROW(validate_job({512, DataType::C64, 65536 - 512}, mem), ConfigError);
}

}  // namespace
}  // namespace echoes
