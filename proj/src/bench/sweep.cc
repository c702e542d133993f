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

#include "binconv/bench/sweep.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include <json.hpp>

#include "binconv/converter/convert.h"
#include "binconv/core/error.h"
#include "binconv/runtime/interpreter.h"
#include "binconv/runtime/profile.h"

namespace binconv::bench {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("sweep config: " + what);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace

void SweepConfig::check() const {
  require(!channels.empty() && !spatial.empty() && !kernels.empty() && !precisions.empty(),
          "channels, spatial, kernels and precisions must be non-empty");
  for (int c : channels) require(c > 0, "channels must be positive");
  for (int s : spatial) require(s > 0, "spatial sizes must be positive");
  for (int k : kernels) require(k > 0 && k % 2 == 1, "kernels must be odd and positive");
  require(runs >= 1, "runs must be at least 1");
  require(warmup >= 0, "warmup must be non-negative");
  require(threads >= 1, "threads must be at least 1");
  require(regression_min_macs >= 0, "regression_min_macs must be non-negative");
}

SweepConfig parse_sweep_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  }
  require(j.is_object(), "top level must be an object");
  SweepConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "channels") {
        c.channels = value.get<std::vector<int>>();
      } else if (key == "spatial") {
        c.spatial = value.get<std::vector<int>>();
      } else if (key == "kernels") {
        c.kernels = value.get<std::vector<int>>();
      } else if (key == "precisions") {
        c.precisions.clear();
        for (const auto& p : value) c.precisions.push_back(precision_from_string(p.get<std::string>()));
      } else if (key == "runs") {
        c.runs = value.get<int>();
      } else if (key == "warmup") {
        c.warmup = value.get<int>();
      } else if (key == "threads") {
        c.threads = value.get<int>();
      } else if (key == "seed") {
        c.seed = value.get<uint64_t>();
      } else if (key == "regression_min_macs") {
        c.regression_min_macs = value.get<double>();
      } else {
        throw ConfigError("sweep config: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  }
  c.check();
  return c;
}

std::optional<double> SweepRow::speedup() const {
  if (!binary_us || !float_us || !(*binary_us > 0)) return std::nullopt;
  return *float_us / *binary_us;
}

double measure_conv_latency(const SingleConvOptions& options, int runs, int warmup,
                            int threads, uint64_t seed) {
  const graph::Graph g = single_conv(options, seed);
  const auto converted = converter::convert(g);
  const auto plan = runtime::ExecutionPlan::build(converted.graph);
  int op = -1;
  for (size_t i = 0; i < plan.ops().size(); ++i) {
    const auto kind = plan.ops()[i].op;
    if (kind == graph::OpKind::kBConv2D || kind == graph::OpKind::kConv2D) op = static_cast<int>(i);
  }
  if (op < 0) throw ConfigError("single_conv graph has no convolution");
  const auto& in = converted.graph.tensor(converted.graph.inputs[0]).shape;
  FloatTensor input(Shape{in[0], in[1], in[2], in[3]});
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal;
  for (float& v : input.data) v = normal(rng);
  const auto p = runtime::profile(plan, {input}, runs, warmup, threads);
  return p.records[op].median_us;
}

SweepSummary summarize(const std::vector<SweepRow>& rows, double regression_min_macs) {
  SweepSummary s;
  std::vector<double> speedups, weights;
  for (const SweepRow& r : rows) {
    if (auto sp = r.speedup()) {
      speedups.push_back(*sp);
      weights.push_back(*r.float_us);
    }
  }
  if (!rows.empty()) {
    auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                        [](const auto& a, const auto& b) { return a.macs < b.macs; });
    s.min_macs = lo->macs;
    s.max_macs = hi->macs;
  }
  s.compared = static_cast<int>(speedups.size());
  if (!speedups.empty()) {
    s.mean_speedup = mean(speedups);
    s.weighted_mean_speedup = weighted_mean(speedups, weights);
    s.min_speedup = *std::min_element(speedups.begin(), speedups.end());
    s.max_speedup = *std::max_element(speedups.begin(), speedups.end());
  }
  auto fit = [&](auto latency) -> std::optional<LinearFit> {
    std::vector<double> x, y;
    for (const SweepRow& r : rows) {
      const std::optional<double> us = latency(r);
      if (!us || static_cast<double>(r.macs) < regression_min_macs || !(*us > 0)) continue;
      x.push_back(std::log(static_cast<double>(r.macs)));
      y.push_back(std::log(*us));
    }
    if (x.size() < 2 || *std::min_element(x.begin(), x.end()) == *std::max_element(x.begin(), x.end())) {
      return std::nullopt;
    }
    return fit_line(x, y);
  };
  s.binary_fit = fit([](const SweepRow& r) { return r.binary_us; });
  s.float_fit = fit([](const SweepRow& r) { return r.float_us; });
  return s;
}

SweepResult run_sweep(const SweepConfig& config,
                      const std::function<void(const SweepRow&)>& progress) {
  config.check();
  SweepResult result;
  result.regression_min_macs = config.regression_min_macs;
  for (int k : config.kernels) {
    for (int c : config.channels) {
      for (int s : config.spatial) {
        SweepRow row;
        row.channels = c;
        row.spatial = s;
        row.kernel = k;
        row.macs = int64_t{s} * s * c * c * k * k;
        SingleConvOptions o;
        o.height = o.width = s;
        o.in_channels = o.out_channels = c;
        o.kernel = k;
        o.padding = "one";
        for (Precision p : config.precisions) {
          o.precision = p;
          const double us =
              measure_conv_latency(o, config.runs, config.warmup, config.threads, config.seed);
          (p == Precision::kBinary ? row.binary_us : row.float_us) = us;
        }
        result.rows.push_back(row);
        if (progress) progress(row);
      }
    }
  }
  result.summary = summarize(result.rows, config.regression_min_macs);
  return result;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream os;
  os << "channels,spatial,kernel,macs,binary_us,float_us,speedup\n";
  for (const SweepRow& r : result.rows) {
    os << r.channels << ',' << r.spatial << ',' << r.kernel << ',' << r.macs << ','
       << fmt(r.binary_us) << ',' << fmt(r.float_us) << ',' << fmt(r.speedup()) << '\n';
  }
  return os.str();
}

std::string format_sweep_summary(const SweepResult& result) {
  const SweepSummary& s = result.summary;
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "configurations            %zu (MACs %lld .. %lld)\n",
                result.rows.size(), static_cast<long long>(s.min_macs),
                static_cast<long long>(s.max_macs));
  os << line;
  if (s.compared > 0) {
    std::snprintf(line, sizeof(line), "speedup mean              %.2fx\n", s.mean_speedup);
    os << line;
    std::snprintf(line, sizeof(line), "speedup weighted mean     %.2fx (weights: float latency)\n",
                  s.weighted_mean_speedup);
    os << line;
    std::snprintf(line, sizeof(line), "speedup range             %.2fx .. %.2fx\n", s.min_speedup,
                  s.max_speedup);
    os << line;
  }
  auto fit_line_text = [&](const char* name, const std::optional<LinearFit>& f) {
    if (!f) {
      std::snprintf(line, sizeof(line), "%-25s not enough points at >= %.0f MACs\n", name,
                    result.regression_min_macs);
    } else {
      std::snprintf(line, sizeof(line),
                    "%-25s slope %.4f intercept %.4f (%d points, ln us vs ln MACs >= %.0f)\n",
                    name, f->slope, f->intercept, f->points, result.regression_min_macs);
    }
    os << line;
  };
  fit_line_text("binary fit", s.binary_fit);
  fit_line_text("float fit", s.float_fit);
  return os.str();
}

}  // namespace binconv::bench
