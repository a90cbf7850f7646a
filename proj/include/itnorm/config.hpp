// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "itnorm/baselines.hpp"
#include "itnorm/latency.hpp"

namespace itnorm {

// Harness settings that may be overridden from a JSON file:
//
//   {
//     "geometry":    { "n_banks": 8, "bank_width": 8, "bank_height": 16, "d_max": 1024 },
//     "stage_costs": { "mul_latency": 2, "mean_sum_fixed": 8, ... },
//     "fisr":        { "fp32_magic": "0x5f3759df", "bf16_magic": "0x5f37", "newton_iters": 1 }
//   }
//
// Every key is optional; omitted keys keep their defaults.
struct HarnessConfig {
  MacroGeometry geometry;
  StageCosts costs;
  std::uint32_t fisr_magic_fp32 = kFisrMagicFp32;
  std::uint32_t fisr_magic_bf16 = kFisrMagicBf16;
  int fisr_newton_iters = 1;

  FisrSpec fisr_spec(Format fmt) const;
};

// Throws DataError on malformed JSON, unknown keys or wrong value types.
HarnessConfig parse_config(std::string_view json_text);
HarnessConfig load_config(const std::filesystem::path& path);

}  // namespace itnorm
