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

#include "binconv/bench/stats.h"

#include "binconv/core/error.h"

namespace binconv::bench {

double mean(std::span<const double> values) {
  if (values.empty()) throw ConfigError("mean of an empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw ConfigError("weighted_mean: length mismatch");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    num += weights[i] * values[i];
    den += weights[i];
  }
  if (!(den > 0.0)) throw ConfigError("weighted_mean: weights must sum to a positive value");
  return num / den;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("fit_line: length mismatch");
  if (x.size() < 2) throw ConfigError("fit_line: needs at least two points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit_line: all x values are equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = static_cast<int>(x.size());
  return f;
}

}  // namespace binconv::bench
