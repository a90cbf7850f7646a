// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "itnorm/norm.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "itnorm/errors.hpp"

namespace itnorm {

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

// Scalar datapath of the update loop: rounds after every op in Format mode.
class ScalarUnit {
 public:
  ScalarUnit(ScalarArithmetic arithmetic, Format fmt) : arithmetic_(arithmetic), fmt_(fmt) {}

  double round(double v) const {
    return arithmetic_ == ScalarArithmetic::Exact ? v : round_binary(v, fmt_).value();
  }
  double mul(double a, double b) const { return round(a * b); }
  double add(double a, double b) const { return round(a + b); }
  double sub(double a, double b) const { return round(a - b); }

 private:
  ScalarArithmetic arithmetic_;
  Format fmt_;
};

int floor_div2(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

}  // namespace

void NormConfig::validate() const {
  if (lambda_override && !(*lambda_override > 0.0)) {
    throw UsageError("lambda override must be positive");
  }
  if (const auto* fixed = std::get_if<FixedSteps>(&stopping)) {
    if (fixed->n_iter < 0) throw UsageError("step count must be >= 0");
  } else {
    const auto& th = std::get<Threshold>(stopping);
    if (!(th.delta_max > 0.0)) throw UsageError("delta_max must be positive");
    if (th.max_steps < 0) throw UsageError("max_steps must be >= 0");
    if (initial_delta && !(*initial_delta > th.delta_max)) {
      throw UsageError("initial delta must exceed delta_max");
    }
  }
}

NormInputs NormInputs::unit_affine(std::vector<FpScalar> x) {
  if (x.empty()) throw UsageError("input vector must be nonempty");
  const Format fmt = x.front().format();
  const std::size_t d = x.size();
  return NormInputs{std::move(x), std::vector<FpScalar>(d, round_binary(1.0, fmt)),
                    std::vector<FpScalar>(d, FpScalar::zero(fmt))};
}

void NormInputs::validate() const {
  if (x.empty()) throw UsageError("input vector must be nonempty");
  if (gamma.size() != x.size() || beta.size() != x.size()) {
    throw UsageError("gamma/beta length " + std::to_string(gamma.size()) + "/" +
                     std::to_string(beta.size()) + " does not match d=" +
                     std::to_string(x.size()));
  }
  const Format fmt = format();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].format() != fmt || gamma[i].format() != fmt || beta[i].format() != fmt) {
      throw UsageError("inputs must share one format");
    }
    if (!x[i].is_finite()) throw DomainError("input element " + std::to_string(i) + " is not finite");
  }
}

StoredConstants stored_constants(std::size_t d, Format fmt) {
  const auto dd = static_cast<double>(d);
  return {round_binary(1.0 / dd, fmt), round_binary(std::sqrt(dd), fmt)};
}

MeanShift mean_shift(std::span<const FpScalar> x) {
  if (x.empty()) throw UsageError("mean_shift: empty input");
  const Format fmt = x.front().format();
  const StoredConstants k = stored_constants(x.size(), fmt);
  MeanShift out;
  out.mean = emu_mul(tree_sum(x, fmt), k.inv_d);
  out.y.reserve(x.size());
  for (const FpScalar& xi : x) out.y.push_back(emu_sub(xi, out.mean));
  return out;
}

FpScalar squared_norm(std::span<const FpScalar> y) {
  if (y.empty()) throw UsageError("squared_norm: empty input");
  const Format fmt = y.front().format();
  std::vector<FpScalar> squares;
  squares.reserve(y.size());
  for (const FpScalar& yi : y) squares.push_back(emu_mul(yi, yi));
  const FpScalar m = tree_sum(squares, fmt);
  if (m.is_inf()) {
    throw RangeError("squared norm overflows " + std::string(to_string(fmt)));
  }
  return m;
}

double init_a(FpScalar m, ScalarArithmetic arithmetic) {
  if (!m.is_finite() || m.is_zero() || m.is_negative()) {
    throw DomainError("init_a: m must be positive and finite");
  }
  // a_0 = 2^-(e+1)/2 with e = E(m) - bias; odd powers use the stored 1/sqrt(2).
  const int p = normalized_exponent(m) + 1;
  const int q = floor_div2(p);
  const double pow2 = std::ldexp(1.0, -q);
  if (p % 2 == 0) return pow2;
  if (arithmetic == ScalarArithmetic::Exact) return pow2 * kInvSqrt2;
  const FpScalar c = round_binary(kInvSqrt2, m.format());
  return round_binary(pow2 * c.value(), m.format()).value();
}

double select_lambda(FpScalar m, std::optional<double> override_lambda) {
  if (override_lambda) {
    if (!(*override_lambda > 0.0)) throw UsageError("lambda override must be positive");
    return *override_lambda;
  }
  if (!m.is_finite() || m.is_zero() || m.is_negative()) {
    throw DomainError("select_lambda: m must be positive and finite");
  }
  return std::ldexp(kLambdaCoefficient, -normalized_exponent(m));
}

IterState initial_state(FpScalar m, const NormConfig& config) {
  IterState s;
  s.m = m.value();
  s.a = init_a(m, config.arithmetic);
  s.lambda = select_lambda(m, config.lambda_override);
  return s;
}

IterOutcome iterate_a(const IterState& state, const NormConfig& config, Format fmt) {
  config.validate();
  if (!(state.m > 0.0)) throw DomainError("iterate_a: m must be positive");
  const ScalarUnit alu(config.arithmetic, fmt);
  const double m = alu.round(state.m);
  const double lambda = state.lambda;

  IterOutcome out;
  double a = alu.round(state.a);
  out.trajectory.push_back(a);

  auto step = [&]() {
    const double ma = alu.mul(m, a);
    const double ma2 = alu.mul(ma, a);
    const double residual = alu.sub(1.0, ma2);
    const double scaled = alu.mul(lambda, ma);
    const double delta = alu.mul(scaled, residual);
    a = alu.add(a, delta);
    out.trajectory.push_back(a);
    ++out.steps;
    return delta;
  };

  if (const auto* fixed = std::get_if<FixedSteps>(&config.stopping)) {
    for (int i = 0; i < fixed->n_iter; ++i) step();
  } else {
    const auto& th = std::get<Threshold>(config.stopping);
    double delta = config.initial_delta.value_or(2.0 * th.delta_max);
    while (std::fabs(delta) > th.delta_max && out.steps < th.max_steps) delta = step();
    out.converged = std::fabs(delta) <= th.delta_max;
  }
  out.a = a;
  return out;
}

OutputStage scale_shift(std::span<const FpScalar> y, double a, std::span<const FpScalar> gamma,
                        std::span<const FpScalar> beta) {
  if (y.empty()) throw UsageError("scale_shift: empty input");
  if (gamma.size() != y.size() || beta.size() != y.size()) {
    throw UsageError("scale_shift: length mismatch");
  }
  const Format fmt = y.front().format();
  const StoredConstants k = stored_constants(y.size(), fmt);
  const FpScalar scale = round_binary(k.sqrt_d.value() * a, fmt);
  OutputStage out;
  out.y_hat.reserve(y.size());
  out.z.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const FpScalar yh = emu_mul(scale, y[i]);
    out.y_hat.push_back(yh);
    out.z.push_back(emu_add(emu_mul(gamma[i], yh), beta[i]));
  }
  return out;
}

NormResult layernorm_iterl2(const NormInputs& inputs, const NormConfig& config) {
  inputs.validate();
  config.validate();
  const Format fmt = inputs.format();

  MeanShift shifted = mean_shift(inputs.x);
  NormResult result;
  result.mean = shifted.mean;
  result.m = squared_norm(shifted.y);

  if (result.m.is_zero()) {
    result.degenerate = true;
    result.y_hat.assign(inputs.dim(), FpScalar::zero(fmt));
    result.z = inputs.beta;
    return result;
  }

  const IterOutcome it = iterate_a(initial_state(result.m, config), config, fmt);
  OutputStage out = scale_shift(shifted.y, it.a, inputs.gamma, inputs.beta);
  result.z = std::move(out.z);
  result.y_hat = std::move(out.y_hat);
  result.a_trajectory = it.trajectory;
  result.steps_taken = it.steps;
  result.converged = it.converged;
  return result;
}

}  // namespace itnorm
