// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "itnorm/baselines.hpp"

#include <cmath>

#include "itnorm/errors.hpp"

namespace itnorm {

FisrSpec FisrSpec::defaults_for(Format fmt) {
  switch (fmt) {
    case Format::FP32:
      return {Format::FP32, kFisrMagicFp32, 1};
    case Format::BF16:
      return {Format::BF16, kFisrMagicBf16, 1};
    case Format::FP16:
      break;
  }
  throw UsageError("FISR needs an 8-bit exponent format (fp32 or bf16), got fp16");
}

void FisrSpec::validate() const {
  if (format_spec(format).exp_bits != 8) {
    throw UsageError("FISR needs an 8-bit exponent format (fp32 or bf16), got " +
                     std::string(to_string(format)));
  }
  if (newton_iters < 0) throw UsageError("newton_iters must be >= 0");
}

FpScalar fisr_inv_sqrt(FpScalar x, const FisrSpec& spec) {
  spec.validate();
  if (x.format() != spec.format) throw UsageError("fisr_inv_sqrt: format mismatch");
  if (x.is_nan() || x.is_zero() || x.is_negative()) {
    throw DomainError("fisr_inv_sqrt: operand must be positive");
  }
  const Format fmt = spec.format;
  FpScalar y(fmt, spec.magic - (x.bits() >> 1));
  const FpScalar half_x = emu_mul(x, round_binary(0.5, fmt));
  const FpScalar three_halves = round_binary(1.5, fmt);
  for (int i = 0; i < spec.newton_iters; ++i) {
    // y * (1.5 - (x/2 * y) * y), evaluated left to right as in the classic code.
    const FpScalar t = emu_mul(emu_mul(half_x, y), y);
    y = emu_mul(y, emu_sub(three_halves, t));
  }
  return y;
}

NormResult layernorm_fisr(const NormInputs& inputs, const FisrSpec& spec) {
  inputs.validate();
  spec.validate();
  if (inputs.format() != spec.format) throw UsageError("layernorm_fisr: format mismatch");
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
  const double a = fisr_inv_sqrt(result.m, spec).value();
  OutputStage out = scale_shift(shifted.y, a, inputs.gamma, inputs.beta);
  result.z = std::move(out.z);
  result.y_hat = std::move(out.y_hat);
  result.a_trajectory = {a};
  return result;
}

namespace {

struct ExactPipeline {
  std::vector<double> y_hat;
  std::vector<double> z;
  double mean = 0.0;
  double m = 0.0;
};

ExactPipeline reference_pipeline(const NormInputs& inputs) {
  inputs.validate();
  const std::size_t d = inputs.dim();
  ExactPipeline p;
  for (const FpScalar& xi : inputs.x) p.mean += xi.value();
  p.mean /= static_cast<double>(d);
  std::vector<double> y(d);
  for (std::size_t i = 0; i < d; ++i) {
    y[i] = inputs.x[i].value() - p.mean;
    p.m += y[i] * y[i];
  }
  p.y_hat.assign(d, 0.0);
  p.z.resize(d);
  const double scale = p.m > 0.0 ? std::sqrt(static_cast<double>(d) / p.m) : 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    p.y_hat[i] = scale * y[i];
    p.z[i] = p.m > 0.0 ? inputs.gamma[i].value() * p.y_hat[i] + inputs.beta[i].value()
                       : inputs.beta[i].value();
  }
  return p;
}

}  // namespace

std::vector<double> layernorm_reference_exact(const NormInputs& inputs) {
  return reference_pipeline(inputs).z;
}

NormResult layernorm_reference(const NormInputs& inputs) {
  const ExactPipeline p = reference_pipeline(inputs);
  const Format fmt = inputs.format();
  NormResult result;
  result.mean = round_binary(p.mean, fmt);
  result.m = round_binary(p.m, fmt);
  result.degenerate = !(p.m > 0.0);
  if (result.degenerate) {
    result.z = inputs.beta;
    result.y_hat.assign(inputs.dim(), FpScalar::zero(fmt));
    return result;
  }
  result.z = round_all(p.z, fmt);
  result.y_hat = round_all(p.y_hat, fmt);
  result.a_trajectory = {1.0 / std::sqrt(p.m)};
  return result;
}

}  // namespace itnorm
