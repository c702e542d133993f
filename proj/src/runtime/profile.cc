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

#include "binconv/runtime/profile.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "binconv/core/error.h"

namespace binconv::runtime {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

Profile profile(const ExecutionPlan& plan, const std::vector<FloatTensor>& inputs, int runs,
                int warmup, int threads) {
  if (runs < 1) throw ConfigError("profile: runs must be at least 1");
  const auto& ops = plan.ops();
  std::vector<std::vector<double>> total(ops.size()), acc(ops.size()), tr(ops.size());
  std::vector<double> end_to_end;
  std::vector<OpTiming> timings;
  for (int r = 0; r < warmup + runs; ++r) {
    const auto start = std::chrono::steady_clock::now();
    plan.execute(inputs, threads, &timings);
    const auto stop = std::chrono::steady_clock::now();
    if (r < warmup) continue;
    end_to_end.push_back(std::chrono::duration<double, std::micro>(stop - start).count());
    for (size_t k = 0; k < ops.size(); ++k) {
      total[k].push_back(timings[k].total_us);
      acc[k].push_back(timings[k].accumulate_us);
      tr[k].push_back(timings[k].transform_us);
    }
  }
  Profile p;
  p.runs = runs;
  p.warmup = warmup;
  p.end_to_end_median_us = median(end_to_end);
  for (size_t k = 0; k < ops.size(); ++k) {
    ProfileRecord rec;
    rec.op = ops[k].id;
    rec.kind = std::string(graph::to_string(ops[k].op));
    rec.layer = static_cast<int>(k);
    rec.median_us = median(total[k]);
    rec.macs_binary = ops[k].macs_binary;
    rec.macs_float = ops[k].macs_float;
    rec.bytes_read = ops[k].bytes_read;
    rec.bytes_written = ops[k].bytes_written;
    rec.accumulate_us = median(acc[k]);
    rec.transform_us = median(tr[k]);
    p.sum_of_medians_us += rec.median_us;
    p.records.push_back(std::move(rec));
  }
  for (ProfileRecord& rec : p.records) {
    rec.pct = p.sum_of_medians_us > 0 ? 100.0 * rec.median_us / p.sum_of_medians_us : 0.0;
  }
  return p;
}

std::string profile_csv(const Profile& p) {
  std::ostringstream os;
  os << "op,kind,layer,median_us,pct,macs_binary,macs_float\n";
  char buf[64];
  for (const ProfileRecord& r : p.records) {
    os << r.op << ',' << r.kind << ',' << r.layer << ',';
    std::snprintf(buf, sizeof(buf), "%.3f,%.4f", r.median_us, r.pct);
    os << buf << ',' << r.macs_binary << ',' << r.macs_float << '\n';
  }
  return os.str();
}

std::vector<CategoryShare> category_breakdown(const Profile& p) {
  std::vector<CategoryShare> shares = {
      {"Quantize", 0, 0},
      {"BConv2D (accumulation loop)", 0, 0},
      {"BConv2D (output transformation)", 0, 0},
      {"Full precision Conv2D", 0, 0},
      {"Full precision Add", 0, 0},
      {"All other", 0, 0},
  };
  for (const ProfileRecord& r : p.records) {
    if (r.kind == "Quantize") {
      shares[0].us += r.median_us;
    } else if (r.kind == "BConv2D") {
      // Split the op median in the ratio of the phase medians.
      const double phases = r.accumulate_us + r.transform_us;
      const double f = phases > 0 ? r.accumulate_us / phases : 1.0;
      shares[1].us += r.median_us * f;
      shares[2].us += r.median_us * (1.0 - f);
    } else if (r.kind == "Conv2D") {
      shares[3].us += r.median_us;
    } else if (r.kind == "Add") {
      shares[4].us += r.median_us;
    } else {
      shares[5].us += r.median_us;
    }
  }
  for (CategoryShare& s : shares) {
    s.pct = p.sum_of_medians_us > 0 ? 100.0 * s.us / p.sum_of_medians_us : 0.0;
  }
  return shares;
}

std::string format_breakdown(const std::vector<CategoryShare>& shares) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof(line), "%-34s %12s %9s\n", "Operator", "Latency us", "Share %");
  os << line;
  for (const CategoryShare& s : shares) {
    std::snprintf(line, sizeof(line), "%-34s %12.1f %9.2f\n", s.category.c_str(), s.us, s.pct);
    os << line;
  }
  return os.str();
}

}  // namespace binconv::runtime
