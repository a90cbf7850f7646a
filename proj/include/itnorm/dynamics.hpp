// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Continuous-time companion of the scalar update loop. Everything here runs in
// binary64 and serves as an analytic reference, not as a datapath.

namespace itnorm::dynamics {

struct DynamicsParams {
  double norm_sq = 1.0;  // m = ||y||^2
  double alpha = 1.0;
  double lambda = 0.5;
  double a0 = 1.0;

  // Throws UsageError unless every field is strictly positive.
  void validate() const;
};

struct KFixedPoints {
  double unstable;
  double stable_pos;
  double stable_neg;
};

// Fixed points of tau dk/dt = k ||y||^2 - alpha k^3.
KFixedPoints k_fixed_points(double norm, double alpha = 1.0);

// Squared norm of the steady-state solution vector.
double steady_norm_sq(double alpha = 1.0);

// Closed-form a(t) of tau da/dt = m a (1 - alpha m a^2) sampled at t = n dt:
//   a_n = a0 [ (1 - alpha m a0^2) e^{-2 m n lambda} + alpha m a0^2 ]^{-1/2}.
// Throws DomainError when the bracket is not positive (outside the basin).
double analytic_a(const DynamicsParams& params, double n);

// The transient (1 - alpha m a0^2) e^{-2 m n lambda} inside the bracket above.
double exponential_term(const DynamicsParams& params, double n);

// (-ln delta_c / (2 n_c)) * 2^-(E - bias): the update rate needed for the
// transient to fall below delta_c within n_c steps, using 2^-(E-bias) as the
// exponent-only stand-in for 1/m.
double lambda_lower_bound(int exponent_minus_bias, double delta_c, int n_c);

// Same requirement with the exact 1/m.
double lambda_lower_bound_exact(double m, double delta_c, int n_c);

}  // namespace itnorm::dynamics
