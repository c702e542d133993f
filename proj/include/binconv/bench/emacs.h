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

#ifndef BINCONV_BENCH_EMACS_H_
#define BINCONV_BENCH_EMACS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "binconv/runtime/interpreter.h"

namespace binconv::bench {

// Binary MACs per float MAC. 15 matches the phone measurements; 17 is the
// usual alternative for a Cortex-A72 board.
inline constexpr double kDefaultEMacFactor = 15.0;

// float_macs + binary_macs / factor. Throws ConfigError unless factor > 0.
double emacs(int64_t binary_macs, int64_t float_macs, double factor);

struct EMacRow {
  std::string model;
  int64_t binary_macs = 0;
  int64_t float_macs = 0;
  double factor = kDefaultEMacFactor;
  double emacs = 0.0;
  std::optional<double> latency_us;
};

// MAC totals over the plan's ops.
EMacRow emac_row(const std::string& model, const runtime::ExecutionPlan& plan, double factor);

// model,binary_macs,float_macs,factor,emacs,latency_us
std::string emacs_csv(const std::vector<EMacRow>& rows);
std::string format_emacs(const std::vector<EMacRow>& rows);

}  // namespace binconv::bench

#endif  // BINCONV_BENCH_EMACS_H_
