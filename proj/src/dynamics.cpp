// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "itnorm/dynamics.hpp"

#include <cmath>

#include "itnorm/errors.hpp"

namespace itnorm::dynamics {

void DynamicsParams::validate() const {
  if (!(norm_sq > 0.0) || !(alpha > 0.0) || !(lambda > 0.0) || !(a0 > 0.0)) {
    throw UsageError("dynamics parameters must be strictly positive");
  }
}

KFixedPoints k_fixed_points(double norm, double alpha) {
  if (!(norm > 0.0) || !(alpha > 0.0)) throw UsageError("norm and alpha must be positive");
  const double k = norm / std::sqrt(alpha);
  return {0.0, k, -k};
}

double steady_norm_sq(double alpha) {
  if (!(alpha > 0.0)) throw UsageError("alpha must be positive");
  return 1.0 / alpha;
}

double exponential_term(const DynamicsParams& params, double n) {
  params.validate();
  const double gap = 1.0 - params.alpha * params.norm_sq * params.a0 * params.a0;
  return gap * std::exp(-2.0 * params.norm_sq * n * params.lambda);
}

double analytic_a(const DynamicsParams& params, double n) {
  if (n < 0.0) throw UsageError("step index must be nonnegative");
  const double bracket =
      exponential_term(params, n) + params.alpha * params.norm_sq * params.a0 * params.a0;
  if (!(bracket > 0.0)) throw DomainError("analytic_a: trajectory leaves the positive basin");
  return params.a0 / std::sqrt(bracket);
}

double lambda_lower_bound(int exponent_minus_bias, double delta_c, int n_c) {
  if (!(delta_c > 0.0 && delta_c < 1.0)) throw UsageError("delta_c must lie in (0, 1)");
  if (n_c < 1) throw UsageError("n_c must be >= 1");
  return -std::log(delta_c) / (2.0 * n_c) * std::ldexp(1.0, -exponent_minus_bias);
}

double lambda_lower_bound_exact(double m, double delta_c, int n_c) {
  if (!(m > 0.0)) throw UsageError("m must be positive");
  if (!(delta_c > 0.0 && delta_c < 1.0)) throw UsageError("delta_c must lie in (0, 1)");
  if (n_c < 1) throw UsageError("n_c must be >= 1");
  return -std::log(delta_c) / (2.0 * n_c * m);
}

}  // namespace itnorm::dynamics
