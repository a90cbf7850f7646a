// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace itnorm {

enum class Format : std::uint8_t { FP32, FP16, BF16 };

inline constexpr std::array<Format, 3> kAllFormats = {Format::FP32, Format::FP16,
                                                      Format::BF16};

// Static layout of a binary interchange-style format.
struct FormatSpec {
  Format name;
  int exp_bits;
  int mant_bits;
  int bias;
  int total_bits;

  constexpr std::uint32_t exp_mask() const { return (1u << exp_bits) - 1u; }
  constexpr std::uint32_t mant_mask() const { return (1u << mant_bits) - 1u; }
  constexpr std::uint32_t sign_mask() const { return 1u << (total_bits - 1); }
  constexpr std::uint32_t bit_mask() const {
    return total_bits == 32 ? 0xFFFFFFFFu : (1u << total_bits) - 1u;
  }
  // Unbiased exponent of the smallest normal number.
  constexpr int min_exponent() const { return 1 - bias; }
  // Unbiased exponent of the largest finite number.
  constexpr int max_exponent() const { return static_cast<int>(exp_mask()) - 1 - bias; }
};

inline constexpr FormatSpec kFp32Spec{Format::FP32, 8, 23, 127, 32};
inline constexpr FormatSpec kFp16Spec{Format::FP16, 5, 10, 15, 16};
inline constexpr FormatSpec kBf16Spec{Format::BF16, 8, 7, 127, 16};

constexpr const FormatSpec& format_spec(Format f) {
  switch (f) {
    case Format::FP16:
      return kFp16Spec;
    case Format::BF16:
      return kBf16Spec;
    case Format::FP32:
    default:
      return kFp32Spec;
  }
}

std::string_view to_string(Format f);

// Accepts "fp32", "fp16", "bf16" (case-insensitive). Throws UsageError.
Format parse_format(std::string_view name);

// Raw IEEE-754 style fields of a bit pattern.
struct FpFields {
  std::uint32_t sign = 0;
  std::uint32_t biased_exponent = 0;
  std::uint32_t significand_field = 0;

  friend bool operator==(const FpFields&, const FpFields&) = default;
};

// A format-tagged scalar carried as its raw bit pattern.
class FpScalar {
 public:
  constexpr FpScalar() = default;
  constexpr FpScalar(Format fmt, std::uint32_t bits)
      : bits_(bits & format_spec(fmt).bit_mask()), format_(fmt) {}

  static constexpr FpScalar zero(Format fmt) { return FpScalar(fmt, 0); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr Format format() const { return format_; }
  constexpr const FormatSpec& spec() const { return format_spec(format_); }

  // Exact value; every supported format embeds in binary64.
  double value() const;

  bool is_nan() const;
  bool is_inf() const;
  bool is_finite() const { return !is_nan() && !is_inf(); }
  bool is_zero() const { return (bits_ & ~spec().sign_mask()) == 0; }
  bool is_subnormal() const;
  bool is_negative() const { return (bits_ & spec().sign_mask()) != 0; }

  friend constexpr bool operator==(const FpScalar&, const FpScalar&) = default;

 private:
  std::uint32_t bits_ = 0;
  Format format_ = Format::FP32;
};

// Field split that never throws; the inverse of compose for every pattern.
FpFields raw_fields(FpScalar x);

// Field split for finite operands. Throws DomainError on NaN/Inf.
FpFields decompose(FpScalar x);

FpScalar compose(const FpFields& fields, Format fmt);

// Unbiased exponent of x as if it were normalized (subnormals included).
// Throws DomainError for zero, NaN and Inf.
int normalized_exponent(FpScalar x);

// Round to nearest, ties to even. Overflow goes to infinity, subnormals are
// kept, NaN becomes the positive canonical quiet NaN.
FpScalar round_binary(double x, Format fmt);

FpScalar quiet_nan(Format fmt);
FpScalar infinity(Format fmt, bool negative = false);

// One rounding per primitive op. Mixed formats throw UsageError.
FpScalar emu_add(FpScalar a, FpScalar b);
FpScalar emu_sub(FpScalar a, FpScalar b);
FpScalar emu_mul(FpScalar a, FpScalar b);

// Sum with the macro's reduction order: balanced `arity`-input adder trees
// over each chunk of arity*arity consecutive elements (L1 trees, then an L2
// tree over their outputs), then chunk partials accumulated in chunk order.
// An empty input yields +0 in `fmt`.
FpScalar tree_sum(std::span<const FpScalar> xs, Format fmt, int arity = 8);

// Left-to-right accumulation; reference order for comparisons.
FpScalar sequential_sum(std::span<const FpScalar> xs, Format fmt);

std::vector<FpScalar> round_all(std::span<const double> xs, Format fmt);
std::vector<double> values_of(std::span<const FpScalar> xs);

}  // namespace itnorm
