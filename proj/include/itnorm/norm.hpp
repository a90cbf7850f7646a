// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "itnorm/fpformat.hpp"

namespace itnorm {

// Run a fixed number of update steps (the macro's programmable step count).
struct FixedSteps {
  int n_iter = 5;
};

// Run until |delta a| <= delta_max, giving up after max_steps.
struct Threshold {
  double delta_max = 1e-6;
  int max_steps = 32;
};

// Arithmetic used by the scalar update loop. Vector stages are always
// format-true; Exact keeps a, m, lambda in binary64 for analysis.
enum class ScalarArithmetic { Format, Exact };

struct NormConfig {
  std::variant<FixedSteps, Threshold> stopping = FixedSteps{};
  std::optional<double> lambda_override;
  // Loop-guard seed for Threshold mode; defaults to 2 * delta_max.
  std::optional<double> initial_delta;
  ScalarArithmetic arithmetic = ScalarArithmetic::Format;

  // Throws UsageError.
  void validate() const;
};

struct NormInputs {
  std::vector<FpScalar> x;
  std::vector<FpScalar> gamma;
  std::vector<FpScalar> beta;

  // gamma = 1, beta = 0 in x's format.
  static NormInputs unit_affine(std::vector<FpScalar> x);

  std::size_t dim() const { return x.size(); }
  Format format() const { return x.front().format(); }

  // One format, one length d >= 1, finite x. Throws UsageError / DomainError.
  void validate() const;
};

struct IterState {
  double a = 0.0;
  double m = 0.0;
  double lambda = 0.0;
  int step = 0;
  double delta_a = 0.0;
};

struct IterOutcome {
  double a = 0.0;
  std::vector<double> trajectory;  // a_0 .. a_steps
  int steps = 0;
  bool converged = true;  // false only when Threshold mode hit max_steps
};

struct MeanShift {
  std::vector<FpScalar> y;
  FpScalar mean;
};

struct OutputStage {
  std::vector<FpScalar> y_hat;
  std::vector<FpScalar> z;
};

struct NormResult {
  std::vector<FpScalar> z;
  std::vector<FpScalar> y_hat;
  FpScalar mean;
  FpScalar m;
  std::vector<double> a_trajectory;
  int steps_taken = 0;
  bool converged = true;
  // Zero-variance input: y_hat = 0, z = beta, no iteration.
  bool degenerate = false;
};

// Constants the macro keeps in memory for a given length.
struct StoredConstants {
  FpScalar inv_d;
  FpScalar sqrt_d;
};

StoredConstants stored_constants(std::size_t d, Format fmt);

// lambda = kLambdaCoefficient * 2^-(E(m) - bias).
inline constexpr double kLambdaCoefficient = 0.375;
// Lower bound coefficient of the update rate for 5 steps and 1e-3 tolerance.
inline constexpr double kLambdaBoundCoefficient = 0.345;

MeanShift mean_shift(std::span<const FpScalar> x);

// Sum of squares with the chunked adder-tree order. Throws RangeError when the
// result overflows to infinity.
FpScalar squared_norm(std::span<const FpScalar> y);

// a_0 from the exponent of m alone. Throws DomainError for m <= 0, NaN, Inf.
double init_a(FpScalar m, ScalarArithmetic arithmetic = ScalarArithmetic::Format);

// Default update rate, or `override_lambda` when given (must be > 0).
double select_lambda(FpScalar m, std::optional<double> override_lambda = std::nullopt);

// Seeds the loop state for a positive m.
IterState initial_state(FpScalar m, const NormConfig& config);

// Repeats delta_a = lambda*m*a*(1 - m*a^2), a += delta_a.
IterOutcome iterate_a(const IterState& state, const NormConfig& config, Format fmt);

// y_hat = (sqrt(d) * a) * y, z = gamma * y_hat + beta, with sqrt(d)*a formed
// once and rounded to the format.
OutputStage scale_shift(std::span<const FpScalar> y, double a, std::span<const FpScalar> gamma,
                        std::span<const FpScalar> beta);

NormResult layernorm_iterl2(const NormInputs& inputs, const NormConfig& config = {});

}  // namespace itnorm
