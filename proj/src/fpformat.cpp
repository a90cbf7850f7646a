// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "itnorm/fpformat.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "itnorm/errors.hpp"

namespace itnorm {

std::string_view to_string(Format f) {
  switch (f) {
    case Format::FP32:
      return "fp32";
    case Format::FP16:
      return "fp16";
    case Format::BF16:
      return "bf16";
  }
  return "unknown";
}

Format parse_format(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "fp32" || lower == "float32") return Format::FP32;
  if (lower == "fp16" || lower == "float16" || lower == "half") return Format::FP16;
  if (lower == "bf16" || lower == "bfloat16") return Format::BF16;
  throw UsageError("unknown floating-point format '" + std::string(name) + "'");
}

FpFields raw_fields(FpScalar x) {
  const FormatSpec& f = x.spec();
  const std::uint32_t b = x.bits();
  return FpFields{b >> (f.total_bits - 1), (b >> f.mant_bits) & f.exp_mask(),
                  b & f.mant_mask()};
}

FpFields decompose(FpScalar x) {
  if (!x.is_finite()) throw DomainError("decompose: NaN or Inf operand");
  return raw_fields(x);
}

FpScalar compose(const FpFields& fields, Format fmt) {
  const FormatSpec& f = format_spec(fmt);
  const std::uint32_t bits = ((fields.sign & 1u) << (f.total_bits - 1)) |
                             ((fields.biased_exponent & f.exp_mask()) << f.mant_bits) |
                             (fields.significand_field & f.mant_mask());
  return FpScalar(fmt, bits);
}

bool FpScalar::is_nan() const {
  const FpFields r = raw_fields(*this);
  return r.biased_exponent == spec().exp_mask() && r.significand_field != 0;
}

bool FpScalar::is_inf() const {
  const FpFields r = raw_fields(*this);
  return r.biased_exponent == spec().exp_mask() && r.significand_field == 0;
}

bool FpScalar::is_subnormal() const {
  const FpFields r = raw_fields(*this);
  return r.biased_exponent == 0 && r.significand_field != 0;
}

double FpScalar::value() const {
  const FormatSpec& f = spec();
  const FpFields r = raw_fields(*this);
  const double sign = r.sign ? -1.0 : 1.0;
  if (r.biased_exponent == f.exp_mask()) {
    return r.significand_field == 0 ? sign * std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::quiet_NaN();
  }
  if (r.biased_exponent == 0) {
    return sign * std::ldexp(static_cast<double>(r.significand_field),
                             f.min_exponent() - f.mant_bits);
  }
  const double significand =
      static_cast<double>((1u << f.mant_bits) | r.significand_field);
  return sign * std::ldexp(significand,
                           static_cast<int>(r.biased_exponent) - f.bias - f.mant_bits);
}

int normalized_exponent(FpScalar x) {
  const FpFields r = decompose(x);
  const FormatSpec& f = x.spec();
  if (r.biased_exponent != 0) return static_cast<int>(r.biased_exponent) - f.bias;
  if (r.significand_field == 0) throw DomainError("normalized_exponent: zero operand");
  const int lead = std::bit_width(r.significand_field) - 1;
  return f.min_exponent() - f.mant_bits + lead;
}

FpScalar quiet_nan(Format fmt) {
  const FormatSpec& f = format_spec(fmt);
  return compose({0, f.exp_mask(), 1u << (f.mant_bits - 1)}, fmt);
}

FpScalar infinity(Format fmt, bool negative) {
  return compose({negative ? 1u : 0u, format_spec(fmt).exp_mask(), 0}, fmt);
}

FpScalar round_binary(double x, Format fmt) {
  const FormatSpec& f = format_spec(fmt);
  if (std::isnan(x)) return quiet_nan(fmt);
  const std::uint32_t sign = std::signbit(x) ? 1u : 0u;
  if (std::isinf(x)) return infinity(fmt, sign != 0);
  const double mag = std::fabs(x);
  if (mag == 0.0) return compose({sign, 0, 0}, fmt);

  // Scale so the quantum of the target binade becomes 1, then round the
  // integer significand. Below the normal range the quantum stays pinned at
  // the subnormal spacing.
  const int exponent = std::max(std::ilogb(mag), f.min_exponent());
  const double scaled = std::ldexp(mag, f.mant_bits - exponent);
  const auto significand = static_cast<std::uint64_t>(std::nearbyint(scaled));

  const std::uint64_t hidden = std::uint64_t{1} << f.mant_bits;
  if (significand < hidden) {
    // Subnormal (or rounded down to zero).
    return compose({sign, 0, static_cast<std::uint32_t>(significand)}, fmt);
  }
  int biased = exponent + f.bias;
  std::uint64_t normalized = significand;
  if (normalized >= 2 * hidden) {
    normalized >>= 1;
    ++biased;
  }
  if (biased >= static_cast<int>(f.exp_mask())) return infinity(fmt, sign != 0);
  return compose({sign, static_cast<std::uint32_t>(biased),
                  static_cast<std::uint32_t>(normalized - hidden)},
                 fmt);
}

namespace {

Format common_format(FpScalar a, FpScalar b) {
  if (a.format() != b.format()) {
    throw UsageError("mixed formats in emulated arithmetic: " +
                     std::string(to_string(a.format())) + " and " +
                     std::string(to_string(b.format())));
  }
  return a.format();
}

// Pairwise reduction of one adder tree; `scratch` is reused across calls.
FpScalar adder_tree(std::span<const FpScalar> xs, Format fmt,
                    std::vector<FpScalar>& scratch) {
  if (xs.empty()) return FpScalar::zero(fmt);
  scratch.assign(xs.begin(), xs.end());
  std::size_t n = scratch.size();
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) {
      scratch[i] = emu_add(scratch[2 * i], scratch[2 * i + 1]);
    }
    if (n % 2 == 1) scratch[half] = scratch[n - 1];
    n = (n + 1) / 2;
  }
  return scratch.front();
}

}  // namespace

// binary64 carries at least 2p+2 bits for every supported p, so rounding the
// double result of + - * once more gives the correctly rounded result.
FpScalar emu_add(FpScalar a, FpScalar b) {
  return round_binary(a.value() + b.value(), common_format(a, b));
}

FpScalar emu_sub(FpScalar a, FpScalar b) {
  return round_binary(a.value() - b.value(), common_format(a, b));
}

FpScalar emu_mul(FpScalar a, FpScalar b) {
  return round_binary(a.value() * b.value(), common_format(a, b));
}

FpScalar tree_sum(std::span<const FpScalar> xs, Format fmt, int arity) {
  if (arity < 2) throw UsageError("tree_sum: arity must be at least 2");
  for (const FpScalar& x : xs) {
    if (x.format() != fmt) throw UsageError("tree_sum: mixed formats");
  }
  if (xs.empty()) return FpScalar::zero(fmt);

  const std::size_t group = static_cast<std::size_t>(arity);
  const std::size_t chunk = group * group;
  FpScalar total{};
  bool first = true;
  std::vector<FpScalar> l1_out;
  std::vector<FpScalar> scratch;
  for (std::size_t base = 0; base < xs.size(); base += chunk) {
    const auto chunk_span = xs.subspan(base, std::min(chunk, xs.size() - base));
    l1_out.clear();
    for (std::size_t g = 0; g < chunk_span.size(); g += group) {
      l1_out.push_back(
          adder_tree(chunk_span.subspan(g, std::min(group, chunk_span.size() - g)), fmt,
                     scratch));
    }
    const FpScalar partial = adder_tree(l1_out, fmt, scratch);
    total = first ? partial : emu_add(total, partial);
    first = false;
  }
  return total;
}

FpScalar sequential_sum(std::span<const FpScalar> xs, Format fmt) {
  if (xs.empty()) return FpScalar::zero(fmt);
  FpScalar acc = xs.front();
  for (std::size_t i = 1; i < xs.size(); ++i) acc = emu_add(acc, xs[i]);
  return acc;
}

std::vector<FpScalar> round_all(std::span<const double> xs, Format fmt) {
  std::vector<FpScalar> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(round_binary(x, fmt));
  return out;
}

std::vector<double> values_of(std::span<const FpScalar> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const FpScalar& x : xs) out.push_back(x.value());
  return out;
}

}  // namespace itnorm
