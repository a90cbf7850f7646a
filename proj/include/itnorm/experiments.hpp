// SPDX-FileCopyrightText: © 2026 The itnorm Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "itnorm/config.hpp"
#include "itnorm/fpformat.hpp"
#include "itnorm/latency.hpp"
#include "itnorm/norm.hpp"

namespace itnorm {

enum class ExperimentKind { Precision, Convergence, CompareFisr, Latency, Normalize };

std::string_view to_string(ExperimentKind kind);

inline constexpr std::string_view kRngName = "mt19937_64/splitmix64(seed,d,index)";

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Precision;
  std::vector<Format> formats;
  std::vector<int> dims;
  int num_vectors = 1000;
  std::uint64_t seed = 20240101;
  std::vector<int> steps;
  std::optional<double> lambda_override;
  std::optional<double> delta_max;  // switches the update loop to Threshold mode
  int max_steps = 32;
  HarnessConfig config;
  int threads = 0;  // 0 = hardware concurrency

  // Kind-specific defaults for formats, dims and steps.
  static ExperimentSpec defaults(ExperimentKind kind);
  // Throws UsageError.
  void validate() const;
  NormConfig norm_config(int n_iter) const;
};

// Dims {64, 128, ..., 1024}.
std::vector<int> default_precision_dims();
// Embedding lengths of the OPT model family.
std::vector<int> default_opt_dims();

// Per-element absolute error histogram: bucket 0 holds errors below 1e-9,
// bucket k (1..9) holds [10^(k-10), 10^(k-9)), bucket 10 holds errors >= 1.
inline constexpr std::size_t kHistogramBuckets = 11;
std::size_t histogram_bucket(double abs_err);

struct ErrorStats {
  double sum_abs_err = 0.0;
  double max_abs_err = 0.0;
  std::uint64_t count = 0;
  std::array<std::uint64_t, kHistogramBuckets> histogram{};

  void add(double abs_err);
  void merge(const ErrorStats& other);
  double avg_abs_err() const { return count ? sum_abs_err / static_cast<double>(count) : 0.0; }
};

// Uniform(-1, 1) vector in binary64, reproducible from (seed, d, index) alone.
std::vector<double> uniform_vector(std::uint64_t seed, int d, int index);

// |z - z_ref| per element, compared as exact values.
void accumulate_errors(std::span<const FpScalar> z, std::span<const FpScalar> z_ref,
                       ErrorStats& stats);

struct PrecisionRow {
  Format format;
  int d = 0;  // 0 marks the pooled row over all dims
  ErrorStats stats;
  // Fraction of elements with error above max_abs_err / 10.
  double top_decade_fraction = 0.0;
};

struct ConvergenceRow {
  Format format;
  int steps = 0;
  ErrorStats stats;
};

struct FisrRow {
  Format format;
  int d = 0;
  std::string method;  // "iterl2" or "fisr"
  ErrorStats stats;
};

struct LatencyRow {
  int d = 0;
  CycleReport report;
};

// Every (format, d) row followed by one pooled row per format.
std::vector<PrecisionRow> run_precision(const ExperimentSpec& spec);
std::vector<ConvergenceRow> run_convergence(const ExperimentSpec& spec);
std::vector<FisrRow> run_compare_fisr(const ExperimentSpec& spec);
std::vector<LatencyRow> run_latency(const ExperimentSpec& spec);

struct NormalizeJob {
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<std::filesystem::path> gamma;
  std::optional<std::filesystem::path> beta;
};

// Diagnostics go to <output>.diag.jsonl. Returns the number of vectors.
std::size_t run_normalize(const ExperimentSpec& spec, const NormalizeJob& job);

void write_precision_csv(std::ostream& out, const ExperimentSpec& spec,
                         std::span<const PrecisionRow> rows);
void write_convergence_csv(std::ostream& out, const ExperimentSpec& spec,
                           std::span<const ConvergenceRow> rows);
void write_fisr_csv(std::ostream& out, const ExperimentSpec& spec, std::span<const FisrRow> rows);
void write_latency_csv(std::ostream& out, const ExperimentSpec& spec,
                       std::span<const LatencyRow> rows);

std::string version_string();

}  // namespace itnorm
