// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "itnorm/fpformat.hpp"
#include "itnorm/norm.hpp"

namespace itnorm {

// Fast inverse square root: integer seed magic - (bits >> 1), then Newton.
// Only formats with an 8-bit exponent are supported.
struct FisrSpec {
  Format format = Format::FP32;
  std::uint32_t magic = 0x5f3759dfu;
  int newton_iters = 1;

  static FisrSpec defaults_for(Format fmt);
  void validate() const;
};

inline constexpr std::uint32_t kFisrMagicFp32 = 0x5f3759dfu;
inline constexpr std::uint32_t kFisrMagicBf16 = 0x5f37u;

FpScalar fisr_inv_sqrt(FpScalar x, const FisrSpec& spec);

// Same pipeline as layernorm_iterl2 with the update loop replaced by
// fisr_inv_sqrt(m).
NormResult layernorm_fisr(const NormInputs& inputs, const FisrSpec& spec);

// Ground truth: binary64 layer norm of the decoded inputs, rounded once per
// element to the input format. Zero variance yields z = beta.
NormResult layernorm_reference(const NormInputs& inputs);

// Unrounded binary64 z of the reference pipeline.
std::vector<double> layernorm_reference_exact(const NormInputs& inputs);

}  // namespace itnorm
