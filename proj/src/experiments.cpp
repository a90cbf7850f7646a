// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "itnorm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <thread>

#include "itnorm/baselines.hpp"
#include "itnorm/errors.hpp"
#include "itnorm/vector_io.hpp"
#include "json.hpp"

#ifndef ITNORM_VERSION
#define ITNORM_VERSION "0.0.0"
#endif

namespace itnorm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// handled by exactly one worker; callers write into per-index slots.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t per = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * per;
    const std::size_t hi = std::min(n, lo + per);
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

NormInputs make_inputs(const ExperimentSpec& spec, Format fmt, int d, int index) {
  const std::vector<double> raw = uniform_vector(spec.seed, d, index);
  return NormInputs::unit_affine(round_all(raw, fmt));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, Format>) {
      out += to_string(xs[i]);
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

void write_header(std::ostream& out, const ExperimentSpec& spec) {
  out << "# itnorm-bench " << to_string(spec.kind) << '\n';
  out << "# version: " << version_string() << '\n';
  out << "# seed: " << spec.seed << '\n';
  out << "# rng: " << kRngName << '\n';
  out << "# formats: " << join(spec.formats) << '\n';
  out << "# dims: " << join(spec.dims) << '\n';
  out << "# num_vectors: " << spec.num_vectors << '\n';
  out << "# steps: " << join(spec.steps) << '\n';
  out << "# lambda: "
      << (spec.lambda_override ? num(*spec.lambda_override)
                               : std::string("default 0.375*2^-(E(m)-bias)"))
      << '\n';
  if (spec.delta_max) {
    out << "# stopping: threshold delta_max=" << num(*spec.delta_max)
        << " max_steps=" << spec.max_steps << '\n';
  }
}

void write_stats_hist(std::ostream& out, const ErrorStats& s) {
  for (std::uint64_t c : s.histogram) out << ',' << c;
}

std::string hist_columns() {
  std::string cols;
  cols += ",h_lt1e-9";
  for (int k = 1; k <= 9; ++k) cols += ",h_1e" + std::to_string(k - 10);
  cols += ",h_ge1";
  return cols;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Precision:
      return "precision";
    case ExperimentKind::Convergence:
      return "convergence";
    case ExperimentKind::CompareFisr:
      return "compare-fisr";
    case ExperimentKind::Latency:
      return "latency";
    case ExperimentKind::Normalize:
      return "normalize";
  }
  return "unknown";
}

std::string version_string() { return ITNORM_VERSION; }

std::vector<int> default_precision_dims() {
  std::vector<int> dims;
  for (int d = 64; d <= 1024; d += 64) dims.push_back(d);
  return dims;
}

std::vector<int> default_opt_dims() {
  return {768, 1024, 2048, 2560, 4096, 5120, 7168, 9216, 12288};
}

ExperimentSpec ExperimentSpec::defaults(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  s.formats = {Format::FP32, Format::FP16, Format::BF16};
  s.steps = {5};
  switch (kind) {
    case ExperimentKind::Precision:
      s.dims = default_precision_dims();
      break;
    case ExperimentKind::Convergence:
      s.dims = {1024};
      s.steps.clear();
      for (int n = 1; n <= 10; ++n) s.steps.push_back(n);
      break;
    case ExperimentKind::CompareFisr:
      s.formats = {Format::FP32, Format::BF16};
      s.dims = default_opt_dims();
      break;
    case ExperimentKind::Latency:
      s.formats.clear();
      s.dims = default_precision_dims();
      break;
    case ExperimentKind::Normalize:
      s.formats = {Format::FP32};
      break;
  }
  return s;
}

void ExperimentSpec::validate() const {
  if (num_vectors < 1) throw UsageError("num_vectors must be >= 1");
  for (int d : dims) {
    if (d < 1) throw UsageError("dims must be >= 1");
  }
  for (int n : steps) {
    if (n < 0) throw UsageError("steps must be >= 0");
  }
  if (max_steps < 0) throw UsageError("max_steps must be >= 0");
  if (lambda_override && !(*lambda_override > 0.0)) throw UsageError("lambda must be positive");
  if (delta_max && !(*delta_max > 0.0)) throw UsageError("delta_max must be positive");
  const bool needs_formats = kind != ExperimentKind::Latency;
  if (needs_formats && formats.empty()) throw UsageError("at least one format is required");
  const bool needs_dims = kind != ExperimentKind::Normalize;
  if (needs_dims && dims.empty()) throw UsageError("at least one dim is required");
  if (kind != ExperimentKind::Latency && kind != ExperimentKind::Normalize && steps.empty()) {
    throw UsageError("at least one step count is required");
  }
  if (kind == ExperimentKind::CompareFisr) {
    for (Format f : formats) {
      if (format_spec(f).exp_bits != 8) {
        throw UsageError("compare-fisr supports fp32 and bf16 only: FISR needs an 8-bit exponent");
      }
    }
  }
  if (kind == ExperimentKind::Latency) {
    config.geometry.validate();
    for (int d : dims) {
      if (d > config.geometry.d_max) {
        throw UsageError("latency: d=" + std::to_string(d) + " exceeds d_max=" +
                         std::to_string(config.geometry.d_max));
      }
    }
  }
}

NormConfig ExperimentSpec::norm_config(int n_iter) const {
  NormConfig cfg;
  if (delta_max) {
    cfg.stopping = Threshold{*delta_max, max_steps};
  } else {
    cfg.stopping = FixedSteps{n_iter};
  }
  cfg.lambda_override = lambda_override;
  return cfg;
}

std::size_t histogram_bucket(double abs_err) {
  if (!(abs_err >= 1e-9)) return 0;
  if (abs_err >= 1.0) return kHistogramBuckets - 1;
  const int k = static_cast<int>(std::floor(std::log10(abs_err))) + 10;
  return static_cast<std::size_t>(std::clamp(k, 1, 9));
}

void ErrorStats::add(double abs_err) {
  sum_abs_err += abs_err;
  max_abs_err = std::max(max_abs_err, abs_err);
  ++count;
  ++histogram[histogram_bucket(abs_err)];
}

void ErrorStats::merge(const ErrorStats& other) {
  sum_abs_err += other.sum_abs_err;
  max_abs_err = std::max(max_abs_err, other.max_abs_err);
  count += other.count;
  for (std::size_t i = 0; i < kHistogramBuckets; ++i) histogram[i] += other.histogram[i];
}

std::vector<double> uniform_vector(std::uint64_t seed, int d, int index) {
  const std::uint64_t stream =
      splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(d) ^
                                   splitmix64(static_cast<std::uint64_t>(index) + 1)));
  std::mt19937_64 engine(stream);
  std::vector<double> out(static_cast<std::size_t>(d));
  for (double& v : out) {
    std::uint64_t bits = 0;
    do {
      bits = engine() >> 11;
    } while (bits == 0);
    v = std::ldexp(static_cast<double>(bits), -52) - 1.0;  // (-1, 1)
  }
  return out;
}

void accumulate_errors(std::span<const FpScalar> z, std::span<const FpScalar> z_ref,
                       ErrorStats& stats) {
  if (z.size() != z_ref.size()) throw UsageError("accumulate_errors: length mismatch");
  for (std::size_t i = 0; i < z.size(); ++i) stats.add(std::fabs(z[i].value() - z_ref[i].value()));
}

std::vector<PrecisionRow> run_precision(const ExperimentSpec& spec) {
  spec.validate();
  const NormConfig cfg = spec.norm_config(spec.steps.front());
  std::vector<PrecisionRow> rows;
  for (Format fmt : spec.formats) {
    PrecisionRow pooled{fmt, 0, {}, 0.0};
    std::vector<float> pooled_errors;
    for (int d : spec.dims) {
      const auto n = static_cast<std::size_t>(spec.num_vectors);
      std::vector<std::vector<float>> errors(n);
      std::vector<ErrorStats> stats(n);
      parallel_for(n, spec.threads, [&](std::size_t i) {
        const NormInputs in = make_inputs(spec, fmt, d, static_cast<int>(i));
        const NormResult got = layernorm_iterl2(in, cfg);
        const NormResult ref = layernorm_reference(in);
        accumulate_errors(got.z, ref.z, stats[i]);
        errors[i].reserve(got.z.size());
        for (std::size_t k = 0; k < got.z.size(); ++k) {
          errors[i].push_back(static_cast<float>(std::fabs(got.z[k].value() - ref.z[k].value())));
        }
      });
      PrecisionRow row{fmt, d, {}, 0.0};
      for (const ErrorStats& s : stats) row.stats.merge(s);
      const double cut = row.stats.max_abs_err / 10.0;
      std::uint64_t top = 0;
      for (const auto& e : errors) {
        for (float v : e) {
          if (v > cut) ++top;
          pooled_errors.push_back(v);
        }
      }
      row.top_decade_fraction =
          row.stats.count ? static_cast<double>(top) / static_cast<double>(row.stats.count) : 0.0;
      pooled.stats.merge(row.stats);
      rows.push_back(row);
    }
    const double cut = pooled.stats.max_abs_err / 10.0;
    const auto top = std::count_if(pooled_errors.begin(), pooled_errors.end(),
                                   [cut](float v) { return v > cut; });
    pooled.top_decade_fraction =
        pooled.stats.count ? static_cast<double>(top) / static_cast<double>(pooled.stats.count)
                           : 0.0;
    rows.push_back(pooled);
  }
  return rows;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentSpec& spec) {
  spec.validate();
  const int d = spec.dims.front();
  const int longest = *std::max_element(spec.steps.begin(), spec.steps.end());
  NormConfig cfg = spec.norm_config(longest);
  cfg.stopping = FixedSteps{longest};

  std::vector<ConvergenceRow> rows;
  for (Format fmt : spec.formats) {
    const auto n = static_cast<std::size_t>(spec.num_vectors);
    // stats[i][k] is vector i evaluated after spec.steps[k] steps.
    std::vector<std::vector<ErrorStats>> stats(n, std::vector<ErrorStats>(spec.steps.size()));
    parallel_for(n, spec.threads, [&](std::size_t i) {
      const NormInputs in = make_inputs(spec, fmt, d, static_cast<int>(i));
      const NormResult ref = layernorm_reference(in);
      const MeanShift shifted = mean_shift(in.x);
      const FpScalar m = squared_norm(shifted.y);
      if (m.is_zero()) {
        for (auto& s : stats[i]) accumulate_errors(in.beta, ref.z, s);
        return;
      }
      const IterOutcome it = iterate_a(initial_state(m, cfg), cfg, fmt);
      for (std::size_t k = 0; k < spec.steps.size(); ++k) {
        const double a = it.trajectory[static_cast<std::size_t>(spec.steps[k])];
        const OutputStage out = scale_shift(shifted.y, a, in.gamma, in.beta);
        accumulate_errors(out.z, ref.z, stats[i][k]);
      }
    });
    for (std::size_t k = 0; k < spec.steps.size(); ++k) {
      ConvergenceRow row{fmt, spec.steps[k], {}};
      for (std::size_t i = 0; i < n; ++i) row.stats.merge(stats[i][k]);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<FisrRow> run_compare_fisr(const ExperimentSpec& spec) {
  spec.validate();
  const NormConfig cfg = spec.norm_config(spec.steps.front());
  std::vector<FisrRow> rows;
  for (Format fmt : spec.formats) {
    const FisrSpec fisr = spec.config.fisr_spec(fmt);
    for (int d : spec.dims) {
      const auto n = static_cast<std::size_t>(spec.num_vectors);
      std::vector<ErrorStats> iter_stats(n);
      std::vector<ErrorStats> fisr_stats(n);
      parallel_for(n, spec.threads, [&](std::size_t i) {
        const NormInputs in = make_inputs(spec, fmt, d, static_cast<int>(i));
        const NormResult ref = layernorm_reference(in);
        accumulate_errors(layernorm_iterl2(in, cfg).z, ref.z, iter_stats[i]);
        accumulate_errors(layernorm_fisr(in, fisr).z, ref.z, fisr_stats[i]);
      });
      FisrRow iter_row{fmt, d, "iterl2", {}};
      FisrRow fisr_row{fmt, d, "fisr", {}};
      for (std::size_t i = 0; i < n; ++i) {
        iter_row.stats.merge(iter_stats[i]);
        fisr_row.stats.merge(fisr_stats[i]);
      }
      rows.push_back(iter_row);
      rows.push_back(fisr_row);
    }
  }
  return rows;
}

std::vector<LatencyRow> run_latency(const ExperimentSpec& spec) {
  spec.validate();
  const int n_iter = spec.steps.empty() ? 5 : spec.steps.front();
  std::vector<LatencyRow> rows;
  for (int d : spec.dims) {
    rows.push_back({d, estimate_cycles(d, n_iter, spec.config.geometry, spec.config.costs)});
  }
  return rows;
}

std::size_t run_normalize(const ExperimentSpec& spec, const NormalizeJob& job) {
  const Format text_format = spec.formats.empty() ? Format::FP32 : spec.formats.front();
  const VectorFile input = read_vector_file(job.input, text_format);
  const Format fmt = input.format;

  auto load_param = [&](const std::optional<std::filesystem::path>& path, double fill) {
    if (!path) return std::vector<FpScalar>(input.dim, round_binary(fill, fmt));
    const VectorFile p = read_vector_file(*path, fmt);
    if (p.format != fmt) throw DataError(path->string() + ": format differs from input");
    if (p.rows.size() != 1 || p.dim != input.dim) {
      throw DataError(path->string() + ": expected one vector of length " +
                      std::to_string(input.dim));
    }
    return p.rows.front();
  };
  const std::vector<FpScalar> gamma = load_param(job.gamma, 1.0);
  const std::vector<FpScalar> beta = load_param(job.beta, 0.0);
  const NormConfig cfg = spec.norm_config(spec.steps.empty() ? 5 : spec.steps.front());

  const std::size_t n = input.rows.size();
  std::vector<NormResult> results(n);
  parallel_for(n, spec.threads, [&](std::size_t i) {
    results[i] = layernorm_iterl2(NormInputs{input.rows[i], gamma, beta}, cfg);
  });

  VectorFile output;
  output.format = fmt;
  output.dim = input.dim;
  output.binary = input.binary;
  std::filesystem::path diag_path = job.output;
  diag_path += ".diag.jsonl";
  std::ofstream diag(diag_path);
  if (!diag) throw DataError("cannot write " + diag_path.string());
  for (std::size_t i = 0; i < n; ++i) {
    const NormResult& r = results[i];
    output.rows.push_back(r.z);
    nlohmann::json line = {{"index", i},
                           {"d", input.dim},
                           {"format", to_string(fmt)},
                           {"mean", r.mean.value()},
                           {"m", r.m.value()},
                           {"steps", r.steps_taken},
                           {"converged", r.converged},
                           {"degenerate", r.degenerate},
                           {"a_trajectory", r.a_trajectory}};
    diag << line.dump() << '\n';
  }
  write_vector_file(job.output, output);
  return n;
}

void write_precision_csv(std::ostream& out, const ExperimentSpec& spec,
                         std::span<const PrecisionRow> rows) {
  write_header(out, spec);
  out << "format,d,avg_abs_err,max_abs_err,top_decade_frac,count" << hist_columns() << '\n';
  for (const PrecisionRow& r : rows) {
    out << to_string(r.format) << ',' << (r.d == 0 ? std::string("all") : std::to_string(r.d))
        << ',' << num(r.stats.avg_abs_err()) << ',' << num(r.stats.max_abs_err) << ','
        << num(r.top_decade_fraction) << ',' << r.stats.count;
    write_stats_hist(out, r.stats);
    out << '\n';
  }
}

void write_convergence_csv(std::ostream& out, const ExperimentSpec& spec,
                           std::span<const ConvergenceRow> rows) {
  write_header(out, spec);
  out << "format,steps,avg_abs_err,max_abs_err\n";
  for (const ConvergenceRow& r : rows) {
    out << to_string(r.format) << ',' << r.steps << ',' << num(r.stats.avg_abs_err()) << ','
        << num(r.stats.max_abs_err) << '\n';
  }
}

void write_fisr_csv(std::ostream& out, const ExperimentSpec& spec, std::span<const FisrRow> rows) {
  write_header(out, spec);
  char magic[64];
  std::snprintf(magic, sizeof(magic), "# fisr: fp32_magic=0x%08x bf16_magic=0x%04x newton_iters=%d",
                spec.config.fisr_magic_fp32, spec.config.fisr_magic_bf16,
                spec.config.fisr_newton_iters);
  out << magic << '\n';
  out << "format,d,method,avg_err,max_err\n";
  for (const FisrRow& r : rows) {
    out << to_string(r.format) << ',' << r.d << ',' << r.method << ','
        << num(r.stats.avg_abs_err()) << ',' << num(r.stats.max_abs_err) << '\n';
  }
}

void write_latency_csv(std::ostream& out, const ExperimentSpec& spec,
                       std::span<const LatencyRow> rows) {
  write_header(out, spec);
  out << "d,chunks,total_cycles";
  for (Phase p : kAllPhases) out << ',' << to_string(p);
  out << '\n';
  for (const LatencyRow& r : rows) {
    out << r.d << ',' << chunk_count(r.d, spec.config.geometry) << ',' << r.report.total;
    for (long c : r.report.per_phase) out << ',' << c;
    out << '\n';
  }
}

}  // namespace itnorm
