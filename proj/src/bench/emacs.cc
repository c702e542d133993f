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

#include "binconv/bench/emacs.h"

#include <cstdio>
#include <sstream>

#include "binconv/core/error.h"

namespace binconv::bench {

double emacs(int64_t binary_macs, int64_t float_macs, double factor) {
  if (!(factor > 0.0)) throw ConfigError("eMAC factor must be positive");
  return static_cast<double>(float_macs) + static_cast<double>(binary_macs) / factor;
}

EMacRow emac_row(const std::string& model, const runtime::ExecutionPlan& plan, double factor) {
  EMacRow r;
  r.model = model;
  r.factor = factor;
  for (const runtime::OpInfo& op : plan.ops()) {
    r.binary_macs += op.macs_binary;
    r.float_macs += op.macs_float;
  }
  r.emacs = emacs(r.binary_macs, r.float_macs, factor);
  return r;
}

std::string emacs_csv(const std::vector<EMacRow>& rows) {
  std::ostringstream os;
  os << "model,binary_macs,float_macs,factor,emacs,latency_us\n";
  char buf[96];
  for (const EMacRow& r : rows) {
    os << r.model << ',' << r.binary_macs << ',' << r.float_macs << ',';
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", r.factor, r.emacs);
    os << buf;
    if (r.latency_us) {
      std::snprintf(buf, sizeof(buf), "%.3f", *r.latency_us);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string format_emacs(const std::vector<EMacRow>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-32s %14s %14s %7s %14s %12s\n", "Model", "Binary MACs",
                "Float MACs", "Factor", "eMACs", "Latency us");
  os << line;
  for (const EMacRow& r : rows) {
    char latency[32] = "-";
    if (r.latency_us) std::snprintf(latency, sizeof(latency), "%.1f", *r.latency_us);
    std::snprintf(line, sizeof(line), "%-32s %14lld %14lld %7g %14.0f %12s\n", r.model.c_str(),
                  static_cast<long long>(r.binary_macs), static_cast<long long>(r.float_macs),
                  r.factor, r.emacs, latency);
    os << line;
  }
  return os.str();
}

}  // namespace binconv::bench
