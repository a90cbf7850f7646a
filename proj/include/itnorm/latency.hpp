// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string_view>

namespace itnorm {

struct MacroGeometry {
  int n_banks = 8;       // parallel input-buffer banks
  int bank_width = 8;    // elements per bank row
  int bank_height = 16;  // rows per bank
  int d_max = 1024;

  int chunk_size() const { return n_banks * bank_width; }
  // d_max == n_banks * bank_width * bank_height. Throws UsageError.
  void validate() const;
};

enum class Phase {
  MeanSum,
  MeanMultiply,
  MeanShift,
  InnerProduct,
  Iteration,
  OutputScale,
  OutputAffine,
};

inline constexpr std::array<Phase, 7> kAllPhases = {
    Phase::MeanSum,   Phase::MeanMultiply, Phase::MeanShift,   Phase::InnerProduct,
    Phase::Iteration, Phase::OutputScale,  Phase::OutputAffine};

std::string_view to_string(Phase phase);

// Cycle costs of each phase. A chunk-scaled phase costs
//   fixed + per_chunk * ceil(d / chunk) [+ partial_pass * ceil(chunks / n_banks)]
// where the last term is the reduction of buffered chunk partial sums through
// the n_banks-input L2 tree. The iteration phase costs
//   fixed + n_iter * iteration_step_cycles().
struct StageCosts {
  int mul_latency = 2;
  int add_latency = 2;

  int mean_sum_fixed = 8;
  int mean_sum_per_chunk = 1;
  int mean_sum_partial_pass = 3;
  int mean_multiply_fixed = 4;
  int mean_shift_fixed = 6;
  int mean_shift_per_chunk = 2;
  int inner_product_fixed = 10;
  int inner_product_per_chunk = 1;
  int inner_product_partial_pass = 3;
  int iteration_fixed = 4;
  int output_scale_fixed = 9;
  int output_scale_per_chunk = 1;
  int output_affine_fixed = 12;
  int output_affine_per_chunk = 2;

  // Dependent chain m*a -> (m*a)*a -> 1 - . -> lambda*m*a*(.) -> a + delta:
  // three multiplies and two adds (lambda*m*a overlaps with (m*a)*a).
  int iteration_step_cycles() const { return 3 * mul_latency + 2 * add_latency; }

  // Throws UsageError on negative costs.
  void validate() const;
};

struct CycleReport {
  long total = 0;
  std::array<long, kAllPhases.size()> per_phase{};

  long phase(Phase p) const { return per_phase[static_cast<std::size_t>(p)]; }
};

int chunk_count(int d, const MacroGeometry& geom);

// Throws UsageError for d outside [1, d_max] or n_iter < 0.
CycleReport estimate_cycles(int d, int n_iter, const MacroGeometry& geom = {},
                            const StageCosts& costs = {});

}  // namespace itnorm
