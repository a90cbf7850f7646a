// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "itnorm/latency.hpp"

#include <string>

#include "itnorm/errors.hpp"

namespace itnorm {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::MeanSum:
      return "mean_sum";
    case Phase::MeanMultiply:
      return "mean_multiply";
    case Phase::MeanShift:
      return "mean_shift";
    case Phase::InnerProduct:
      return "inner_product";
    case Phase::Iteration:
      return "iteration";
    case Phase::OutputScale:
      return "output_scale";
    case Phase::OutputAffine:
      return "output_affine";
  }
  return "unknown";
}

void MacroGeometry::validate() const {
  if (n_banks < 1 || bank_width < 1 || bank_height < 1) {
    throw UsageError("macro geometry dimensions must be positive");
  }
  if (d_max != n_banks * bank_width * bank_height) {
    throw UsageError("d_max must equal n_banks * bank_width * bank_height");
  }
}

void StageCosts::validate() const {
  const int all[] = {mul_latency,
                     add_latency,
                     mean_sum_fixed,
                     mean_sum_per_chunk,
                     mean_sum_partial_pass,
                     mean_multiply_fixed,
                     mean_shift_fixed,
                     mean_shift_per_chunk,
                     inner_product_fixed,
                     inner_product_per_chunk,
                     inner_product_partial_pass,
                     iteration_fixed,
                     output_scale_fixed,
                     output_scale_per_chunk,
                     output_affine_fixed,
                     output_affine_per_chunk};
  for (int c : all) {
    if (c < 0) throw UsageError("stage costs must be nonnegative");
  }
}

int chunk_count(int d, const MacroGeometry& geom) {
  const int chunk = geom.chunk_size();
  return (d + chunk - 1) / chunk;
}

CycleReport estimate_cycles(int d, int n_iter, const MacroGeometry& geom,
                            const StageCosts& costs) {
  geom.validate();
  costs.validate();
  if (d < 1 || d > geom.d_max) {
    throw UsageError("d=" + std::to_string(d) + " outside [1, " + std::to_string(geom.d_max) +
                     "]");
  }
  if (n_iter < 0) throw UsageError("n_iter must be >= 0");

  const long chunks = chunk_count(d, geom);
  const long partial_passes = (chunks + geom.n_banks - 1) / geom.n_banks;

  CycleReport r;
  auto set = [&r](Phase p, long cycles) { r.per_phase[static_cast<std::size_t>(p)] = cycles; };
  set(Phase::MeanSum, costs.mean_sum_fixed + costs.mean_sum_per_chunk * chunks +
                          costs.mean_sum_partial_pass * partial_passes);
  set(Phase::MeanMultiply, costs.mean_multiply_fixed);
  set(Phase::MeanShift, costs.mean_shift_fixed + costs.mean_shift_per_chunk * chunks);
  set(Phase::InnerProduct, costs.inner_product_fixed + costs.inner_product_per_chunk * chunks +
                               costs.inner_product_partial_pass * partial_passes);
  set(Phase::Iteration, costs.iteration_fixed + static_cast<long>(costs.iteration_step_cycles()) * n_iter);
  set(Phase::OutputScale, costs.output_scale_fixed + costs.output_scale_per_chunk * chunks);
  set(Phase::OutputAffine, costs.output_affine_fixed + costs.output_affine_per_chunk * chunks);
  for (long c : r.per_phase) r.total += c;
  return r;
}

}  // namespace itnorm
