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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "binconv/bench/factory.h"
#include "binconv/bench/sweep.h"
#include "binconv/converter/convert.h"
#include "binconv/converter/model_format.h"
#include "binconv/core/bitpack.h"
#include "binconv/core/error.h"
#include "binconv/kernels/bconv.h"
#include "binconv/kernels/float_ops.h"
#include "binconv/runtime/interpreter.h"
#include "binconv/runtime/profile.h"
#include "support/oracles.h"
#include "support/random_graphs.h"

namespace binconv {
namespace {

using testing::Rng;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. n - 2 popcount(x ^ w) equals the +-1 dot product.

// Packs +-1 rows into single-row-per-vector word arrays (bit 1 for -1).
std::vector<uint32_t> pack_rows(const std::vector<std::vector<int>>& rows, int words) {
  std::vector<uint32_t> out(rows.size() * words, 0u);
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t i = 0; i < rows[r].size(); ++i) {
      if (rows[r][i] < 0) out[r * words + i / 32] |= 1u << (i % 32);
    }
  }
  return out;
}

int64_t count_dot_failures(const std::vector<std::vector<int>>& xs,
                           const std::vector<std::vector<int>>& ws, int n) {
  const int words = packed_words(n);
  const std::vector<uint32_t> lhs = pack_rows(xs, words);
  const std::vector<uint32_t> rhs = pack_rows(ws, words);
  std::vector<int32_t> acc(xs.size() * ws.size());
  kernels::bgemm(lhs.data(), static_cast<int>(xs.size()), rhs.data(), static_cast<int>(ws.size()),
                 words, acc.data(), 1);
  int64_t failures = 0;
  for (size_t r = 0; r < xs.size(); ++r) {
    for (size_t c = 0; c < ws.size(); ++c) {
      const int64_t dot = kernels::accumulator_to_dot(n, acc[r * ws.size() + c]);
      if (dot != testing::pm1_dot(xs[r], ws[c])) ++failures;
    }
  }
  return failures;
}

Outcome dot_identity() {
  // n = 8: every sign pattern of x against every sign pattern of w.
  std::vector<std::vector<int>> all(256, std::vector<int>(8));
  for (int p = 0; p < 256; ++p) {
    for (int i = 0; i < 8; ++i) all[p][i] = (p >> i) & 1 ? -1 : 1;
  }
  int64_t failures = count_dot_failures(all, all, 8);
  int64_t trials = 256 * 256;
  Rng rng(101);
  for (int n : {32, 96, 512}) {
    // 1000 x 100 pairs = 1e5 trials.
    std::vector<std::vector<int>> xs(1000, std::vector<int>(n)), ws(100, std::vector<int>(n));
    for (auto* set : {&xs, &ws}) {
      for (auto& v : *set) {
        for (int& e : v) e = testing::uniform_int(rng, 0, 1) ? 1 : -1;
      }
    }
    failures += count_dot_failures(xs, ws, n);
    trials += 100000;
  }
  return {failures == 0, format("%lld trials, %lld failures", static_cast<long long>(trials),
                                static_cast<long long>(failures))};
}

// ---------------------------------------------------------------------------
// 2. BConv kernel against the scalar oracle.

Outcome kernel_vs_oracle() {
  Rng rng(202);
  int float_cases = 0, bit_cases = 0, bit_mismatches = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    kernels::BConvDescriptor d;
    d.kernel_h = d.kernel_w = 1 + 2 * testing::uniform_int(rng, 0, 2);
    d.stride_h = d.stride_w = testing::uniform_int(rng, 1, 2);
    d.in_channels = testing::uniform_int(rng, 32, 96);
    d.out_channels = testing::uniform_int(rng, 1, 64);
    d.padding = static_cast<kernels::PaddingMode>(t % 3);
    d.output_kind = (t / 3) % 2 ? kernels::OutputKind::kBitpacked : kernels::OutputKind::kFloat;
    const int act = testing::uniform_int(rng, 0, 2);
    d.activation.kind = static_cast<kernels::ActivationKind>(act);
    d.activation.cap = static_cast<float>(testing::uniform(rng, 1, 10));
    const int n = d.dot_length();
    for (int c = 0; c < d.out_channels; ++c) {
      d.multiplier.push_back(testing::uniform(rng, -2, 2) / std::sqrt(double(n)));
      d.bias.push_back(testing::uniform(rng, -1, 1));
    }
    const int h = testing::uniform_int(rng, d.kernel_h, 12);
    const int w = testing::uniform_int(rng, d.kernel_w, 12);
    const FloatTensor xf = testing::random_signs(rng, Shape{testing::uniform_int(rng, 1, 2), h, w,
                                                            d.in_channels});
    const FloatTensor wf = testing::random_signs(
        rng, Shape{d.out_channels, d.kernel_h, d.kernel_w, d.in_channels});
    const BitpackedTensor x = quantize(xf), wt = quantize(wf);
    kernels::PaddingCorrection corr;
    if (d.padding == kernels::PaddingMode::kZeroCorrected) {
      corr = kernels::build_padding_correction(wt, d, h, w);
    }

    testing::ConvSpec spec{d.kernel_h, d.kernel_w, d.stride_h, d.stride_w,
                           d.padding != kernels::PaddingMode::kValid,
                           d.padding == kernels::PaddingMode::kOne ? 1.0 : 0.0};
    const testing::ConvResult raw = testing::naive_conv(xf, wf, spec);
    const testing::Act oracle_act = act == 0   ? testing::Act::kNone
                                    : act == 1 ? testing::Act::kRelu
                                               : testing::Act::kClamp;
    const std::vector<double> expected =
        testing::affine(raw, d.multiplier, d.bias, oracle_act, d.activation.cap);

    if (d.output_kind == kernels::OutputKind::kFloat) {
      const FloatTensor out = kernels::bconv2d_float(x, wt, d, corr.empty() ? nullptr : &corr);
      if (!(out.shape == raw.shape)) return {false, format("config %d: shape mismatch", t)};
      for (size_t i = 0; i < expected.size(); ++i) {
        worst = std::max(worst, std::abs(out.data[i] - expected[i]));
      }
      ++float_cases;
    } else {
      const kernels::ThresholdFit fit = kernels::compute_thresholds(d);
      if (!fit.non_monotone.empty()) return {false, format("config %d: no threshold", t)};
      d.thresholds = fit.set;
      const BitpackedTensor out = kernels::bconv2d_bitpacked(x, wt, d, corr.empty() ? nullptr : &corr);
      const std::vector<int> bits = testing::unpack_bits(out);
      if (bits.size() != expected.size()) return {false, format("config %d: shape mismatch", t)};
      for (size_t i = 0; i < expected.size(); ++i) {
        if (bits[i] != (expected[i] < 0 ? 1 : 0)) ++bit_mismatches;
      }
      ++bit_cases;
    }
  }
  return {worst <= 1e-4 && bit_mismatches == 0,
          format("%d float configs, max abs error %.3g; %d bitpacked configs, %d bit mismatches",
                 float_cases, worst, bit_cases, bit_mismatches)};
}

// ---------------------------------------------------------------------------
// 3. Threshold fusion against the float path, exhaustive over the accumulator.

Outcome threshold_fusion() {
  Rng rng(303);
  int64_t checked = 0, mismatches = 0;
  int ties = 0;
  for (int t = 0; t < 100; ++t) {
    kernels::BConvDescriptor d;
    d.in_channels = testing::uniform_int(rng, 1, 512);
    d.out_channels = 1;
    const int n = d.dot_length();
    const int act = testing::uniform_int(rng, 0, 2);
    d.activation.kind = static_cast<kernels::ActivationKind>(act);
    d.activation.cap = static_cast<float>(testing::uniform_int(rng, 1, 64));
    double gamma, beta;
    if (t % 4 == 0) {
      // Exact tie: gamma * dot0 + beta == 0 for an achievable dot0.
      gamma = std::ldexp(testing::uniform_int(rng, 1, 8), -testing::uniform_int(rng, 0, 4)) *
              (testing::uniform_int(rng, 0, 1) ? 1 : -1);
      const int acc0 = testing::uniform_int(rng, 0, n);
      const double dot0 = n - 2.0 * acc0;
      beta = -gamma * kernels::apply_activation(dot0, d.activation);
      ++ties;
    } else if (t % 25 == 1) {
      gamma = 0.0;
      beta = testing::uniform(rng, -1, 1);
    } else {
      gamma = testing::uniform(rng, -2, 2);
      beta = testing::uniform(rng, -std::sqrt(double(n)), std::sqrt(double(n)));
    }
    d.multiplier = {gamma};
    d.bias = {beta};
    const kernels::ThresholdFit fit = kernels::compute_thresholds(d);
    if (!fit.non_monotone.empty()) {
      mismatches += n + 1;
      continue;
    }
    d.thresholds = fit.set;
    d.output_kind = kernels::OutputKind::kBitpacked;
    kernels::AccumulatorMatrix acc{n + 1, 1, {}};
    for (int a = 0; a <= n; ++a) acc.data.push_back(a);
    const BitpackedTensor packed =
        kernels::output_transform_bitpacked(acc, d, Shape{1, n + 1, 1, 1});
    for (int a = 0; a <= n; ++a) {
      // Unfused path: float output, then sign.
      const double dot = n - 2.0 * a;
      const float value = static_cast<float>(
          gamma * testing::activate(dot, static_cast<testing::Act>(act), d.activation.cap) + beta);
      const bool expected = value < 0.0f;
      const bool fused = fit.set.bit(0, a);
      const bool kernel = (packed.words[a] & 1u) != 0;
      if (fused != expected || kernel != expected) ++mismatches;
      ++checked;
    }
  }
  return {mismatches == 0, format("100 channels (%d with exact ties), %lld accumulator values, "
                                  "%lld mismatches",
                                  ties, static_cast<long long>(checked),
                                  static_cast<long long>(mismatches))};
}

// ---------------------------------------------------------------------------
// 4. Every pass preserves semantics; conversion is idempotent.

Outcome converter_preservation() {
  Rng rng(404);
  converter::ConvertOptions opts;
  opts.verify = true;
  int verified = 0, failed = 0, not_idempotent = 0;
  std::string first_problem;
  for (int t = 0; t < 50; ++t) {
    const graph::Graph g = testing::random_factory_graph(rng);
    opts.verify_options.seed = rng();
    try {
      const converter::ConversionResult r = converter::convert(g, opts);
      for (const converter::PassReport& p : r.reports) {
        if (p.equivalent.value_or(false)) {
          ++verified;
        } else {
          ++failed;
        }
      }
      const converter::ConversionResult again = converter::convert(converter::read_model(r.model));
      if (again.model != r.model) {
        ++not_idempotent;
        if (first_problem.empty()) first_problem = format("graph %d not idempotent", t);
      }
    } catch (const Error& e) {
      ++failed;
      if (first_problem.empty()) first_problem = format("graph %d: %s", t, e.what());
    }
  }
  std::string detail = format("50 graphs, %d pass verifications passed, %d failed, %d not idempotent",
                              verified, failed, not_idempotent);
  if (!first_problem.empty()) detail += "; " + first_problem;
  return {failed == 0 && not_idempotent == 0, detail};
}

// ---------------------------------------------------------------------------
// 5. Packed weights are 1/32 of the float weights.

Outcome compression() {
  bool ok = true;
  std::string detail;
  for (int c : {32, 256}) {
    bench::SingleConvOptions o;
    o.height = o.width = 4;
    o.in_channels = c;
    o.out_channels = c == 32 ? 64 : 256;
    const graph::Graph g = bench::single_conv(o, 5);
    const graph::TensorDef& wf = g.tensor(g.nodes[g.find_node("conv")].inputs[1]);
    const graph::Graph m = converter::convert(g).graph;
    const graph::TensorDef& wp = m.tensor(m.nodes[m.find_node("conv")].inputs[1]);
    const size_t float_bytes = wf.byte_size(), packed_bytes = wp.byte_size();
    ok = ok && wp.dtype == graph::DType::kBitpacked && float_bytes == 32 * packed_bytes;
    if (!detail.empty()) detail += "; ";
    detail += format("3x3x%dx%d: %zu -> %zu bytes", c, o.out_channels, float_bytes, packed_bytes);
  }
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 6. quantize(maxpool(x)) == bmaxpool(quantize(x)).

Outcome maxpool_identity() {
  Rng rng(606);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    kernels::PoolParams p;
    const int size = testing::uniform_int(rng, 1, 3);
    p.pool_h = p.pool_w = size;
    p.stride_h = p.stride_w = testing::uniform_int(rng, 1, 3);
    p.same_padding = testing::uniform_int(rng, 0, 1) == 1;
    const Shape s{testing::uniform_int(rng, 1, 2), testing::uniform_int(rng, size, 12),
                  testing::uniform_int(rng, size, 12), testing::uniform_int(rng, 1, 100)};
    const FloatTensor x = testing::random_normal(rng, s);
    const BitpackedTensor lhs = quantize(kernels::maxpool(x, p));
    const BitpackedTensor rhs = kernels::bmaxpool(quantize(x), p);
    const std::vector<int> oracle =
        testing::sign_bits(testing::naive_maxpool(x, size, p.stride_h, p.same_padding));
    if (lhs.words != rhs.words || testing::unpack_bits(rhs) != oracle) ++mismatches;
  }
  return {mismatches == 0, format("1000 tensors, %d mismatches", mismatches)};
}

// ---------------------------------------------------------------------------
// 7. Binary conv speedup over the float baseline.

Outcome speedup() {
  bool ok = true;
  std::string detail;
  for (int spatial : {14, 7}) {
    bench::SingleConvOptions o;
    o.height = o.width = spatial;
    o.in_channels = o.out_channels = 256;
    o.kernel = 3;
    o.padding = "one";
    o.precision = bench::Precision::kBinary;
    const double binary_us = bench::measure_conv_latency(o, 30, 3, 1, 7);
    o.precision = bench::Precision::kFloat;
    const double float_us = bench::measure_conv_latency(o, 30, 3, 1, 7);
    const double ratio = float_us / binary_us;
    ok = ok && ratio >= 4.0;
    if (!detail.empty()) detail += "; ";
    detail += format("%dx%dx256x256x3x3: binary %.1f us, float %.1f us, %.2fx", spatial, spatial,
                     binary_us, float_us, ratio);
  }
  detail += " (floor 4x; reference range 8.5-18.5x)";
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 8. Latency grows about linearly with MACs.

Outcome linearity() {
  const bench::SweepConfig config;
  const bench::SweepResult r = bench::run_sweep(config);
  const auto& fit = r.summary.binary_fit;
  if (!fit) return {false, "no regression points"};
  std::string detail = format("binary ln-ln slope %.4f over %d configs with >= %.0f MACs",
                              fit->slope, fit->points, r.regression_min_macs);
  if (r.summary.float_fit) detail += format(" (float slope %.4f)", r.summary.float_fit->slope);
  return {fit->slope >= 0.7 && fit->slope <= 1.3, detail};
}

// ---------------------------------------------------------------------------
// 9. Profile breakdown of the QuickNet-like model.

Outcome profile_consistency() {
  const graph::Graph g = bench::quicknet_like(bench::QuickNetOptions{}, 9);
  const runtime::ExecutionPlan plan = runtime::load_model(converter::convert(g).model);
  Rng rng(909);
  const FloatTensor input =
      testing::random_normal(rng, plan.graph().tensor(plan.graph().inputs[0]).nhwc());
  const runtime::Profile p = runtime::profile(plan, {input}, 10, 2, 1);
  double total = 0.0;
  for (const runtime::ProfileRecord& r : p.records) total += r.pct;
  const auto shares = runtime::category_breakdown(p);
  const auto top = std::max_element(shares.begin(), shares.end(),
                                     [](const auto& a, const auto& b) { return a.pct < b.pct; });
  std::string detail = format("%zu ops, per-op sum %.3f%%, largest: %s %.1f%%", p.records.size(),
                              total, top->category.c_str(), top->pct);
  for (const auto& s : shares) detail += format(" | %s %.1f%%", s.category.c_str(), s.pct);
  const bool accumulation_first = top->category == "BConv2D (accumulation loop)";
  return {std::abs(total - 100.0) <= 0.5 && accumulation_first, detail};
}

// ---------------------------------------------------------------------------
// 10. Outputs do not depend on the thread count.

Outcome determinism() {
  Rng rng(1010);
  int differing = 0;
  for (int t = 0; t < 20; ++t) {
    const graph::Graph g =
        t % 2 ? testing::random_factory_graph(rng) : testing::random_training_graph(rng);
    const runtime::ExecutionPlan plan = runtime::load_model(converter::convert(g).model);
    std::vector<FloatTensor> in;
    for (graph::TensorId id : plan.graph().inputs) {
      in.push_back(testing::random_normal(rng, plan.graph().tensor(id).nhwc()));
    }
    const auto base = plan.execute(in, 1);
    for (int threads : {2, 4}) {
      const auto other = plan.execute(in, threads);
      bool same = other.size() == base.size();
      for (size_t k = 0; same && k < base.size(); ++k) {
        same = other[k].shape == base[k].shape &&
               std::equal(base[k].data.begin(), base[k].data.end(), other[k].data.begin(),
                          [](float a, float b) {
                            return std::bit_cast<uint32_t>(a) == std::bit_cast<uint32_t>(b);
                          });
      }
      if (!same) ++differing;
    }
  }
  return {differing == 0, format("20 models x threads {1,2,4}, %d differing runs", differing)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  double budget_s;
};

}  // namespace
}  // namespace binconv

int main() {
  using namespace binconv;
  const std::vector<Criterion> criteria = {
      {"dot-product identity", dot_identity, 10},
      {"kernel vs scalar oracle", kernel_vs_oracle, 60},
      {"threshold fusion exactness", threshold_fusion, 60},
      {"converter semantic preservation", converter_preservation, 600},
      {"weight compression factor", compression, 60},
      {"maxpool reorder identity", maxpool_identity, 60},
      {"relative speedup", speedup, 120},
      {"MACs-latency linearity", linearity, 600},
      {"profile consistency", profile_consistency, 120},
      {"determinism across threads", determinism, 120},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (seconds > criteria[i].budget_s) {
      o.pass = false;
      o.detail += format(" [over the %.0f s budget]", criteria[i].budget_s);
    }
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, o.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
