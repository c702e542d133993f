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

#ifndef BINCONV_BENCH_STATS_H_
#define BINCONV_BENCH_STATS_H_

#include <span>

namespace binconv::bench {

double mean(std::span<const double> values);
// sum(w * v) / sum(w). Throws ConfigError when the weights sum to zero.
double weighted_mean(std::span<const double> values, std::span<const double> weights);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

// Ordinary least squares y = intercept + slope * x. Needs two distinct x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace binconv::bench

#endif  // BINCONV_BENCH_STATS_H_
