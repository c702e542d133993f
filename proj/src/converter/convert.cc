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

#include "binconv/converter/convert.h"

#include <cmath>
#include <random>
#include <sstream>

#include "binconv/converter/model_format.h"
#include "binconv/core/error.h"
#include "binconv/kernels/parallel.h"
#include "binconv/runtime/oracle.h"

namespace binconv::converter {

using graph::Graph;
using graph::Node;
using graph::OpKind;

namespace {

constexpr int kMaxDraws = 32;

std::vector<FloatTensor> random_inputs(const Graph& g, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 1.0f);
  std::vector<FloatTensor> inputs;
  for (graph::TensorId id : g.inputs) {
    FloatTensor t(g.tensor(id).nhwc());
    for (float& v : t.data) v = normal(rng);
    inputs.push_back(std::move(t));
  }
  return inputs;
}

struct ProbeResult {
  double max_error = 0.0;
  std::string mismatch;
};

ProbeResult run_probe(const Graph& before, const Graph& after, const VerifyOptions& o,
                      int index) {
  std::vector<FloatTensor> inputs;
  std::vector<FloatTensor> expected;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    inputs = random_inputs(before, o.seed + 0x9e3779b97f4a7c15ull * (index * kMaxDraws + draw + 1));
    runtime::OracleTrace trace;
    expected = runtime::run_oracle(before, inputs, &trace);
    if (trace.min_sign_margin >= o.sign_margin) break;
  }
  const std::vector<FloatTensor> actual = runtime::run_oracle(after, inputs);
  ProbeResult r;
  if (actual.size() != expected.size()) {
    r.mismatch = "output count changed";
    r.max_error = INFINITY;
    return r;
  }
  for (size_t k = 0; k < expected.size(); ++k) {
    if (actual[k].shape != expected[k].shape) {
      r.mismatch = "output " + std::to_string(k) + " shape " + actual[k].shape.str() +
                   " != " + expected[k].shape.str();
      r.max_error = INFINITY;
      return r;
    }
    for (size_t i = 0; i < expected[k].data.size(); ++i) {
      const double err = std::abs(double{actual[k].data[i]} - expected[k].data[i]);
      if (!(err <= r.max_error)) {
        r.max_error = std::isnan(err) ? INFINITY : err;
        if (!(err <= o.tolerance) && r.mismatch.empty()) {
          std::ostringstream os;
          os << "probe " << index << ", output " << k << "[" << i << "]: "
             << actual[k].data[i] << " vs " << expected[k].data[i];
          r.mismatch = os.str();
        }
      }
    }
  }
  return r;
}

void inject_fault(Graph& g) {
  for (Node& n : g.nodes) {
    if (n.op == OpKind::kBConv2D) {
      auto& a = n.attr<graph::BConv2DAttrs>();
      if (a.output == kernels::OutputKind::kBitpacked) {
        for (auto& t : a.thresholds.channels) {
          t.flip = !t.flip;
          if (t.constant) t.constant = !*t.constant;
        }
      } else {
        for (double& m : a.multiplier) m = -m;
        for (double& b : a.bias) b = -b - 1.0;
      }
      return;
    }
  }
  for (Node& n : g.nodes) {
    if (n.op == OpKind::kConv2D) {
      auto& a = n.attr<graph::Conv2DAttrs>();
      if (a.multiplier.empty()) a.multiplier.assign(g.tensor(n.inputs[1]).shape[0], 1.0);
      for (double& m : a.multiplier) m = -m;
      return;
    }
  }
  for (auto& [id, t] : g.tensors) {
    if (auto* v = std::get_if<std::vector<float>>(&t.data)) {
      for (float& x : *v) x += 1.0f;
      return;
    }
  }
}

}  // namespace

Equivalence check_equivalence(const Graph& before, const Graph& after,
                              const VerifyOptions& options) {
  std::vector<ProbeResult> results(options.probes);
  kernels::parallel_for(0, options.probes, options.threads, [&](int64_t b, int64_t e) {
    for (int64_t p = b; p < e; ++p) {
      results[p] = run_probe(before, after, options, static_cast<int>(p));
    }
  });
  Equivalence eq;
  eq.probes = options.probes;
  for (const ProbeResult& r : results) {
    eq.max_abs_error = std::max(eq.max_abs_error, r.max_error);
    if (!r.mismatch.empty() && eq.detail.empty()) eq.detail = r.mismatch;
  }
  eq.equivalent = eq.detail.empty();
  return eq;
}

ConversionResult convert(const Graph& g, const ConvertOptions& options) {
  ConversionResult result;
  result.graph = g;
  for (const Pass& pass : pipeline()) {
    Graph before;
    if (options.verify) before = result.graph;
    PassReport report = pass.run(result.graph);
    if (options.inject_fault == pass.name) inject_fault(result.graph);
    if (options.verify) {
      const Equivalence eq = check_equivalence(before, result.graph, options.verify_options);
      report.equivalent = eq.equivalent;
      report.max_abs_error = eq.max_abs_error;
      report.probes = eq.probes;
      if (!eq.equivalent) {
        throw ConversionError(pass.name, "", "verification failed: " + eq.detail);
      }
    }
    result.reports.push_back(std::move(report));
  }
  result.model = write_model(result.graph);
  return result;
}

}  // namespace binconv::converter
