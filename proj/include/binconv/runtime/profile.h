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

#ifndef BINCONV_RUNTIME_PROFILE_H_
#define BINCONV_RUNTIME_PROFILE_H_

#include <string>
#include <vector>

#include "binconv/runtime/interpreter.h"

namespace binconv::runtime {

struct ProfileRecord {
  std::string op;    // node id
  std::string kind;  // op name
  int layer = 0;     // position in execution order
  double median_us = 0.0;
  double pct = 0.0;  // of the summed per-op medians
  int64_t macs_binary = 0;
  int64_t macs_float = 0;
  int64_t bytes_read = 0;
  int64_t bytes_written = 0;
  // BConv2D only: medians of the two timed phases.
  double accumulate_us = 0.0;
  double transform_us = 0.0;
};

struct Profile {
  std::vector<ProfileRecord> records;
  double end_to_end_median_us = 0.0;
  double sum_of_medians_us = 0.0;
  int runs = 0;
  int warmup = 0;
};

// Runs the plan `warmup + runs` times and keeps the last `runs`.
Profile profile(const ExecutionPlan& plan, const std::vector<FloatTensor>& inputs, int runs,
                int warmup, int threads = 1);

// op,kind,layer,median_us,pct,macs_binary,macs_float
std::string profile_csv(const Profile& p);

struct CategoryShare {
  std::string category;
  double us = 0.0;
  double pct = 0.0;
};

// Latency grouped as: Quantize, BConv2D accumulation loop, BConv2D output
// transformation, float Conv2D, float Add, everything else.
std::vector<CategoryShare> category_breakdown(const Profile& p);

std::string format_breakdown(const std::vector<CategoryShare>& shares);

double median(std::vector<double> values);

}  // namespace binconv::runtime

#endif  // BINCONV_RUNTIME_PROFILE_H_
