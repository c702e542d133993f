/* Copyright 2026 The binconv Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BINCONV_BENCH_SWEEP_H_
#define BINCONV_BENCH_SWEEP_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "binconv/bench/factory.h"
#include "binconv/bench/stats.h"

namespace binconv::bench {

// Square stride-1 same-padded convolutions with equal input and output
// channel counts, one per (channels, spatial, kernel) triple.
struct SweepConfig {
  std::vector<int> channels = {32, 64, 96, 128, 160, 256};
  std::vector<int> spatial = {8, 16, 32, 64};
  std::vector<int> kernels = {3, 5};
  std::vector<Precision> precisions = {Precision::kBinary, Precision::kFloat};
  int runs = 5;
  int warmup = 1;
  int threads = 1;
  uint64_t seed = 1;
  // Only configurations with at least this many MACs enter the regression.
  double regression_min_macs = 1e6;

  void check() const;
};

// JSON object with any of the keys channels, spatial, kernels, precisions,
// runs, warmup, threads, seed, regression_min_macs. Missing keys keep their
// defaults; unknown keys are rejected. Throws ConfigError.
SweepConfig parse_sweep_config(const std::string& json_text);

struct SweepRow {
  int channels = 0;
  int spatial = 0;
  int kernel = 0;
  int64_t macs = 0;
  std::optional<double> binary_us;
  std::optional<double> float_us;

  // float / binary latency, when both were measured.
  std::optional<double> speedup() const;
};

struct SweepSummary {
  // Speedup statistics over rows that have both precisions.
  int compared = 0;
  double mean_speedup = 0.0;
  double weighted_mean_speedup = 0.0;  // weights: float latency
  double min_speedup = 0.0;
  double max_speedup = 0.0;
  int64_t min_macs = 0;
  int64_t max_macs = 0;
  // ln(latency_us) against ln(MACs) over rows at or above the MAC cut-off.
  std::optional<LinearFit> binary_fit;
  std::optional<LinearFit> float_fit;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SweepSummary summary;
  double regression_min_macs = 1e6;
};

// Median latency in microseconds of the convolution op alone (the Quantize
// feeding a binary conv is not included).
double measure_conv_latency(const SingleConvOptions& options, int runs, int warmup,
                            int threads, uint64_t seed);

SweepSummary summarize(const std::vector<SweepRow>& rows, double regression_min_macs);

// `progress` is called after each row.
SweepResult run_sweep(const SweepConfig& config,
                      const std::function<void(const SweepRow&)>& progress = {});

// channels,spatial,kernel,macs,binary_us,float_us,speedup with round-trip
// precision; an unmeasured precision is left empty.
std::string sweep_csv(const SweepResult& result);
std::string format_sweep_summary(const SweepResult& result);

}  // namespace binconv::bench

#endif  // BINCONV_BENCH_SWEEP_H_
