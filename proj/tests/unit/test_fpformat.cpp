// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "itnorm/errors.hpp"
#include "itnorm/fpformat.hpp"
#include "oracles/oracles.hpp"

namespace itnorm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(FormatSpec, LayoutInvariants) {
  for (Format f : kAllFormats) {
    const FormatSpec& s = format_spec(f);
    EXPECT_EQ(s.total_bits, 1 + s.exp_bits + s.mant_bits) << to_string(f);
    EXPECT_EQ(s.bias, (1 << (s.exp_bits - 1)) - 1) << to_string(f);
  }
  EXPECT_EQ(kFp32Spec.bias, 127);
  EXPECT_EQ(kBf16Spec.bias, 127);
  EXPECT_EQ(kFp16Spec.bias, 15);
}

TEST(FormatSpec, ParseNames) {
  EXPECT_EQ(parse_format("fp32"), Format::FP32);
  EXPECT_EQ(parse_format("BF16"), Format::BF16);
  EXPECT_EQ(parse_format("half"), Format::FP16);
  EXPECT_THROW(parse_format("fp8"), UsageError);
  for (Format f : kAllFormats) EXPECT_EQ(parse_format(to_string(f)), f);
}

TEST(Decompose, Examples) {
  EXPECT_EQ(decompose(round_binary(5.0, Format::FP32)), (FpFields{0, 129, 0x200000}));
  EXPECT_EQ(decompose(round_binary(1.0, Format::FP32)), (FpFields{0, 127, 0}));
  EXPECT_EQ(decompose(round_binary(1.0, Format::BF16)), (FpFields{0, 127, 0}));
  EXPECT_EQ(decompose(round_binary(-2.0, Format::FP16)), (FpFields{1, 16, 0}));
}

TEST(Decompose, RejectsNonFinite) {
  for (Format f : kAllFormats) {
    EXPECT_THROW(decompose(quiet_nan(f)), DomainError);
    EXPECT_THROW(decompose(infinity(f)), DomainError);
    EXPECT_THROW(decompose(infinity(f, true)), DomainError);
  }
}

TEST(Decompose, RoundTripExhaustive16Bit) {
  for (Format f : {Format::FP16, Format::BF16}) {
    int mismatches = 0;
    for (std::uint32_t b = 0; b < 0x10000; ++b) {
      const FpScalar x(f, b);
      if (x.is_nan() || x.is_inf()) continue;
      if (compose(decompose(x), f).bits() != b) ++mismatches;
    }
    EXPECT_EQ(mismatches, 0) << to_string(f);
  }
}

TEST(Decompose, ValueMatchesFields) {
  std::mt19937 rng(7);
  for (int i = 0; i < 100000; ++i) {
    const FpScalar x(Format::FP32, rng());
    if (!x.is_finite() || x.is_subnormal() || x.is_zero()) continue;
    const FpFields r = decompose(x);
    const double significand = 1.0 + std::ldexp(double(r.significand_field), -23);
    ASSERT_GE(significand, 1.0);
    ASSERT_LT(significand, 2.0);
    const double v = (r.sign ? -1 : 1) * std::ldexp(significand, int(r.biased_exponent) - 127);
    ASSERT_EQ(v, x.value());
  }
}

TEST(Value, MatchesNativeFloatForAllFp32Classes) {
  std::mt19937 rng(11);
  for (int i = 0; i < 200000; ++i) {
    const std::uint32_t b = rng();
    float f;
    std::memcpy(&f, &b, sizeof f);
    const double v = FpScalar(Format::FP32, b).value();
    if (std::isnan(f)) {
      ASSERT_TRUE(std::isnan(v));
    } else {
      ASSERT_EQ(v, static_cast<double>(f)) << std::hex << b;
    }
  }
}

TEST(NormalizedExponent, SubnormalsUseLeadingBit) {
  // Smallest FP16 subnormal is 2^-24.
  EXPECT_EQ(normalized_exponent(FpScalar(Format::FP16, 1)), -24);
  EXPECT_EQ(normalized_exponent(FpScalar(Format::FP16, 0x3FF)), -15);
  EXPECT_EQ(normalized_exponent(round_binary(5.0, Format::FP32)), 2);
  EXPECT_THROW(normalized_exponent(FpScalar::zero(Format::BF16)), DomainError);
}

TEST(RoundBinary, Examples) {
  EXPECT_EQ(round_binary(1.0, Format::FP16).bits(), 0x3C00u);
  const FpScalar third = round_binary(1.0 / 3.0, Format::BF16);
  EXPECT_EQ(third.bits(), 0x3EABu);
  EXPECT_EQ(third.value(), 0.333984375);
  EXPECT_TRUE(round_binary(65520.0, Format::FP16).is_inf());
  EXPECT_EQ(round_binary(65519.0, Format::FP16).value(), 65504.0);
  EXPECT_TRUE(round_binary(-kInf, Format::BF16).is_negative());
  EXPECT_TRUE(round_binary(std::nan(""), Format::FP32).is_nan());
  EXPECT_EQ(round_binary(std::nan(""), Format::FP16), quiet_nan(Format::FP16));
  EXPECT_TRUE(round_binary(-0.0, Format::FP16).is_negative());
}

TEST(RoundBinary, SubnormalsAndUnderflow) {
  // FP16: 2^-24 is the smallest subnormal; 2^-25 is a tie between 0 and it.
  EXPECT_EQ(round_binary(std::ldexp(1.0, -24), Format::FP16).bits(), 1u);
  EXPECT_EQ(round_binary(std::ldexp(1.0, -25), Format::FP16).bits(), 0u);
  EXPECT_EQ(round_binary(std::ldexp(1.5, -25), Format::FP16).bits(), 1u);
  EXPECT_EQ(round_binary(std::ldexp(3.0, -25), Format::FP16).bits(), 2u);  // tie -> even
  // Largest subnormal rounding up into the smallest normal.
  EXPECT_EQ(round_binary(std::ldexp(1.0, -14) * (1 - std::ldexp(1.0, -12)), Format::FP16).bits(),
            0x400u);
}

TEST(RoundBinary, MatchesTableOracleOnDenseGrid) {
  const oracle::RoundingOracle ref;
  std::mt19937_64 rng(3);
  for (Format f : kAllFormats) {
    const FormatSpec& s = format_spec(f);
    std::uniform_int_distribution<int> expo(s.min_exponent() - s.mant_bits - 2,
                                            s.max_exponent() + 1);
    std::uniform_real_distribution<double> sig(1.0, 2.0);
    int mismatches = 0;
    for (int i = 0; i < 300000; ++i) {
      double x = std::ldexp(sig(rng), expo(rng));
      if (i % 2) x = -x;
      if (round_binary(x, f) != ref.round(x, f)) ++mismatches;
    }
    EXPECT_EQ(mismatches, 0) << to_string(f);
  }
}

TEST(RoundBinary, ExhaustiveMidpointsAndNeighbours16Bit) {
  // For every adjacent pair of finite values: the midpoint (a tie) and points
  // just either side of it.
  for (Format f : {Format::FP16, Format::BF16}) {
    const oracle::NearestTable table(f);
    const auto& v = table.values();
    int mismatches = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double mid = 0.5 * (v[i] + v[i + 1]);
      for (double x : {v[i], mid, std::nextafter(mid, 0.0), std::nextafter(mid, kInf)}) {
        if (round_binary(x, f) != table.round(x)) ++mismatches;
        if (round_binary(-x, f) != table.round(-x)) ++mismatches;
      }
    }
    EXPECT_EQ(mismatches, 0) << to_string(f);
  }
}

TEST(RoundBinary, IdempotentOnAllPatterns) {
  std::mt19937 rng(5);
  for (Format f : kAllFormats) {
    for (int i = 0; i < 100000; ++i) {
      const double x = std::ldexp(std::uniform_real_distribution<double>(-2, 2)(rng),
                                  std::uniform_int_distribution<int>(-140, 130)(rng));
      const FpScalar once = round_binary(x, f);
      ASSERT_EQ(round_binary(once.value(), f), once) << x;
    }
  }
}

TEST(EmuOps, Examples) {
  const FpScalar one16 = round_binary(1.0, Format::FP16);
  EXPECT_EQ(emu_add(one16, round_binary(std::ldexp(1.0, -24), Format::FP16)), one16);
  const FpScalar p = emu_mul(round_binary(1.5, Format::BF16), round_binary(1.5, Format::BF16));
  EXPECT_EQ(p.value(), 2.25);
  EXPECT_THROW(emu_add(one16, round_binary(1.0, Format::FP32)), UsageError);
  EXPECT_THROW(emu_mul(one16, round_binary(1.0, Format::BF16)), UsageError);
}

TEST(EmuOps, MultiplyByOneIsIdentity) {
  for (Format f : {Format::FP16, Format::BF16}) {
    const FpScalar one = round_binary(1.0, f);
    for (std::uint32_t b = 0; b < 0x10000; ++b) {
      const FpScalar x(f, b);
      if (!x.is_finite()) continue;
      ASSERT_EQ(emu_mul(x, one), x) << std::hex << b;
    }
  }
}

TEST(EmuOps, InfAndNanSemantics) {
  for (Format f : kAllFormats) {
    const FpScalar inf = infinity(f);
    const FpScalar one = round_binary(1.0, f);
    EXPECT_TRUE(emu_add(inf, one).is_inf());
    EXPECT_TRUE(emu_sub(inf, inf).is_nan());
    EXPECT_TRUE(emu_mul(inf, FpScalar::zero(f)).is_nan());
    EXPECT_TRUE(emu_add(quiet_nan(f), one).is_nan());
  }
}

TEST(EmuOps, CommutativeAndOracleExact) {
  const oracle::RoundingOracle ref;
  std::mt19937 rng(13);
  for (Format f : kAllFormats) {
    const std::uint32_t mask = format_spec(f).bit_mask();
    int mismatches = 0;
    for (int i = 0; i < 100000; ++i) {
      const FpScalar a(f, rng() & mask);
      const FpScalar b(f, rng() & mask);
      if (!a.is_finite() || !b.is_finite()) continue;
      const FpScalar s = emu_add(a, b);
      const FpScalar m = emu_mul(a, b);
      if (s != emu_add(b, a) || m != emu_mul(b, a)) ++mismatches;
      if (s != ref.round(a.value() + b.value(), f)) ++mismatches;
      if (emu_sub(a, b) != ref.round(a.value() - b.value(), f)) ++mismatches;
      if (m != ref.round(a.value() * b.value(), f)) ++mismatches;
    }
    EXPECT_EQ(mismatches, 0) << to_string(f);
  }
}

TEST(TreeSum, Examples) {
  const std::vector<FpScalar> ones(64, round_binary(1.0, Format::FP32));
  EXPECT_EQ(tree_sum(ones, Format::FP32).value(), 64.0);
  const FpScalar x = round_binary(0.1, Format::BF16);
  EXPECT_EQ(tree_sum(std::vector<FpScalar>{x}, Format::BF16), x);
  EXPECT_TRUE(tree_sum(std::vector<FpScalar>{}, Format::FP16).is_zero());
  EXPECT_THROW(tree_sum(ones, Format::FP32, 1), UsageError);
  EXPECT_THROW(tree_sum(ones, Format::FP16), UsageError);
}

TEST(TreeSum, OrderDiffersFromSequential) {
  std::vector<FpScalar> xs{round_binary(1.0, Format::FP16)};
  xs.resize(64, round_binary(std::ldexp(1.0, -11), Format::FP16));
  const FpScalar tree = tree_sum(xs, Format::FP16);
  const FpScalar seq = sequential_sum(xs, Format::FP16);
  // Sequentially each 2^-11 is a tie against 1.0 and rounds to even. In the
  // tree only the first one meets 1.0 alone; the rest pair up exactly.
  EXPECT_EQ(seq.value(), 1.0);
  EXPECT_EQ(tree.value(), 1.0 + 62 * std::ldexp(1.0, -11));
  EXPECT_NE(tree, seq);
}

// Independent model of the reduction order, written recursively.
double model_tree(const std::vector<double>& xs, std::size_t lo, std::size_t n, Format f) {
  if (n == 1) return xs[lo];
  std::size_t half = 1;
  while (half * 2 < n) half *= 2;
  const double l = model_tree(xs, lo, half, f);
  const double r = model_tree(xs, lo + half, n - half, f);
  return round_binary(l + r, f).value();
}

TEST(TreeSum, MatchesRecursiveModelForFullChunks) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Format f : kAllFormats) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t d = 64 * (1 + trial % 5);
      std::vector<FpScalar> xs;
      for (std::size_t i = 0; i < d; ++i) xs.push_back(round_binary(u(rng), f));
      const std::vector<double> v = values_of(xs);
      double total = 0.0;
      for (std::size_t c = 0; c < d; c += 64) {
        const double part = model_tree(v, c, 64, f);
        total = c == 0 ? part : round_binary(total + part, f).value();
      }
      ASSERT_EQ(tree_sum(xs, f).value(), total) << to_string(f) << " d=" << d;
    }
  }
}

TEST(TreeSum, DeterministicAndExactForIntegers) {
  // Small integers sum exactly in any order, including ragged tails.
  for (std::size_t d : {1u, 7u, 9u, 63u, 65u, 100u, 513u}) {
    std::vector<FpScalar> xs;
    double expect = 0;
    for (std::size_t i = 0; i < d; ++i) {
      xs.push_back(round_binary(double(i % 5), Format::FP32));
      expect += double(i % 5);
    }
    EXPECT_EQ(tree_sum(xs, Format::FP32).value(), expect) << d;
    EXPECT_EQ(tree_sum(xs, Format::FP32), tree_sum(xs, Format::FP32));
  }
}

}  // namespace
}  // namespace itnorm
