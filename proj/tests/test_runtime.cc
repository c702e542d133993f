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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "binconv/bench/factory.h"
#include "binconv/converter/convert.h"
#include "binconv/converter/model_format.h"
#include "binconv/core/error.h"
#include "binconv/runtime/interpreter.h"
#include "binconv/runtime/oracle.h"
#include "binconv/runtime/planner.h"
#include "binconv/runtime/profile.h"
#include "support/oracles.h"
#include "support/random_graphs.h"

namespace binconv::runtime {
namespace {

using graph::DType;
using graph::Graph;
using graph::Node;
using graph::OpKind;
using graph::TensorId;
using testing::Rng;

ExecutionPlan plan_for(const Graph& g) {
  return load_model(converter::convert(g).model);
}

Graph sign_only(const Shape& s, bool float_reader) {
  Graph g;
  const TensorId x = g.add_tensor(DType::kF32, {s.batch, s.height, s.width, s.channels});
  g.inputs = {x};
  Node n;
  n.id = "sign";
  n.op = OpKind::kSign;
  n.inputs = {x};
  n.outputs = {g.add_tensor(DType::kF32)};
  g.nodes.push_back(n);
  TensorId out = n.outputs[0];
  if (float_reader) {
    Node r;
    r.id = "relu";
    r.op = OpKind::kReLU;
    r.attrs = graph::ReluAttrs{};
    r.inputs = {out};
    out = g.add_tensor(DType::kF32);
    r.outputs = {out};
    g.nodes.push_back(r);
  }
  g.outputs = {out};
  return g;
}

TEST_CASE("converted graphs match the reference evaluator") {
  Rng rng(21);
  int compared = 0;
  int skipped = 0;
  std::map<OpKind, int> seen;
  std::map<graph::BConvPadding, int> paddings;
  for (int t = 0; t < 200; ++t) {
    const Graph g = testing::random_training_graph(rng);
    const converter::ConversionResult r = converter::convert(g);
    for (const Node& n : r.graph.nodes) {
      ++seen[n.op];
      if (n.op == OpKind::kBConv2D) ++paddings[n.attr<graph::BConv2DAttrs>().padding];
    }
    std::vector<FloatTensor> inputs;
    if (!testing::draw_inputs(g, rng, 1e-4, 64, &inputs)) {
      ++skipped;
      continue;
    }
    const ExecutionPlan plan = load_model(r.model);
    const testing::Comparison c =
        testing::compare(plan.execute(inputs), run_oracle(g, inputs));
    CHECK(c.shapes_match);
    CHECK_MESSAGE(c.max_abs_error <= 1e-4, "graph " << t << " error " << c.max_abs_error);
    ++compared;
  }
  MESSAGE("compared " << compared << ", skipped " << skipped);
  CHECK(skipped <= 10);
  for (OpKind k : {OpKind::kConv2D, OpKind::kBConv2D, OpKind::kBMaxPool2D, OpKind::kMaxPool2D,
                   OpKind::kBatchNorm, OpKind::kReLU, OpKind::kAdd, OpKind::kDense,
                   OpKind::kGlobalAvgPool, OpKind::kQuantize, OpKind::kDequantize}) {
    CHECK_MESSAGE(seen[k] > 0, graph::to_string(k) << " never generated");
  }
  CHECK(paddings[graph::BConvPadding::kValid] > 0);
  CHECK(paddings[graph::BConvPadding::kOne] > 0);
  CHECK(paddings[graph::BConvPadding::kZeroCorrected] > 0);
}

TEST_CASE("float-only graphs match within 1e-5") {
  Rng rng(22);
  for (int t = 0; t < 20; ++t) {
    bench::SingleConvOptions o;
    o.precision = bench::Precision::kFloat;
    o.height = o.width = testing::uniform_int(rng, 3, 10);
    o.in_channels = testing::uniform_int(rng, 1, 24);
    o.out_channels = testing::uniform_int(rng, 1, 24);
    o.kernel = 1 + 2 * testing::uniform_int(rng, 0, 1);
    o.relu = t % 2;
    o.batch_norm = t % 3 != 0;
    o.maxpool_before = t % 4 == 0;
    const Graph g = bench::single_conv(o, rng());
    const std::vector<FloatTensor> in = {
        testing::random_normal(rng, g.tensor(g.inputs[0]).nhwc())};
    const testing::Comparison c = testing::compare(plan_for(g).execute(in), run_oracle(g, in));
    CHECK(c.shapes_match);
    CHECK(c.max_abs_error <= 1e-5);
  }
}

TEST_CASE("quantize then dequantize equals sign, zero maps to +1") {
  Rng rng(23);
  const Shape s{2, 3, 3, 37};
  for (bool float_reader : {false, true}) {
    const ExecutionPlan plan = plan_for(sign_only(s, float_reader));
    FloatTensor x = testing::random_normal(rng, s);
    x.data[0] = 0.0f;
    x.data[1] = -0.0f;
    const std::vector<FloatTensor> out = plan.execute({x});
    REQUIRE(out.size() == 1);
    REQUIRE(out[0].data.size() == x.data.size());
    for (size_t i = 0; i < x.data.size(); ++i) {
      const double sign = testing::sign_pm1(x.data[i]);
      CHECK(out[0].data[i] == static_cast<float>(float_reader ? std::max(sign, 0.0) : sign));
    }
    const FloatTensor zeros(s, std::vector<float>(s.elements(), 0.0f));
    const std::vector<FloatTensor> z = plan.execute({zeros});
    for (float v : z[0].data) CHECK(v == 1.0f);
  }
}

TEST_CASE("memory planner") {
  SUBCASE("random request sets never overlap") {
    Rng rng(24);
    for (int t = 0; t < 1000; ++t) {
      const int count = testing::uniform_int(rng, 1, 40);
      const int ops = testing::uniform_int(rng, 1, 30);
      std::vector<BufferRequest> req(count);
      for (BufferRequest& r : req) {
        r.bytes = testing::uniform_int(rng, 1, 5000);
        r.first = testing::uniform_int(rng, 0, ops - 1);
        r.last = testing::uniform_int(rng, r.first, ops - 1);
      }
      const MemoryPlan plan = plan_memory(req);
      REQUIRE(plan.buffers.size() == req.size());
      CHECK_FALSE(find_overlap(plan).has_value());
      CHECK(plan.arena_bytes <= unshared_bytes(req));
      for (size_t i = 0; i < req.size(); ++i) {
        const BufferPlacement& b = plan.buffers[i];
        CHECK(b.offset % kArenaAlignment == 0);
        CHECK(b.bytes >= req[i].bytes);
        CHECK(b.offset + b.bytes <= plan.arena_bytes);
        // Brute-force pairwise check, independent of find_overlap.
        for (size_t j = 0; j < i; ++j) {
          const BufferPlacement& o = plan.buffers[j];
          const bool live = b.first <= o.last && o.first <= b.last;
          const bool disjoint = b.offset + req[i].bytes <= o.offset ||
                                o.offset + req[j].bytes <= b.offset;
          if (live) CHECK(disjoint);
        }
      }
    }
  }
  SUBCASE("a single-op model needs its input and output") {
    // Quantize -> Dequantize -> ReLU: one input and three outputs.
    const ExecutionPlan plan = plan_for(sign_only(Shape{1, 4, 4, 8}, true));
    CHECK(plan.memory().buffers.size() == 4);
    bench::SingleConvOptions f;
    f.precision = bench::Precision::kFloat;
    const ExecutionPlan conv = plan_for(bench::single_conv(f, 1));
    REQUIRE(conv.ops().size() == 1);
    CHECK(conv.memory().buffers.size() == 2);
  }
  SUBCASE("buffers are reused in a deep chain") {
    bench::QuickNetOptions o;
    o.layers = {2, 2};
    o.filters = {16, 32};
    o.input_size = 32;
    o.classes = 10;
    const ExecutionPlan plan = plan_for(bench::quicknet_like(o, 1));
    CHECK(plan.arena_bytes() < plan.unshared_bytes());
    CHECK_FALSE(find_overlap(plan.memory()).has_value());
  }
}

TEST_CASE("outputs do not depend on the thread count") {
  Rng rng(25);
  for (int t = 0; t < 10; ++t) {
    const Graph g = t % 2 ? testing::random_factory_graph(rng) : testing::random_training_graph(rng);
    const ExecutionPlan plan = plan_for(g);
    std::vector<FloatTensor> in;
    for (TensorId id : plan.graph().inputs) {
      in.push_back(testing::random_normal(rng, plan.graph().tensor(id).nhwc()));
    }
    const auto one = plan.execute(in, 1);
    for (int threads : {2, 4}) {
      const auto many = plan.execute(in, threads);
      REQUIRE(many.size() == one.size());
      for (size_t k = 0; k < one.size(); ++k) CHECK(many[k].data == one[k].data);
    }
  }
}

TEST_CASE("execute rejects inputs of the wrong shape") {
  bench::SingleConvOptions o;
  const ExecutionPlan plan = plan_for(bench::single_conv(o, 2));
  CHECK_THROWS_AS(plan.execute({}), Error);
  CHECK_THROWS_AS(plan.execute({FloatTensor(Shape{1, 2, 2, 32})}), Error);
}

TEST_CASE("profiling") {
  SUBCASE("a single-op model gets all of the time") {
    bench::SingleConvOptions f;
    f.precision = bench::Precision::kFloat;
    const ExecutionPlan plan = plan_for(bench::single_conv(f, 3));
    Rng rng(26);
    const Profile p = profile(plan, {testing::random_normal(rng, Shape{1, 16, 16, 32})}, 5, 1);
    REQUIRE(p.records.size() == 1);
    CHECK(p.records[0].pct == doctest::Approx(100.0));
    CHECK(p.runs == 5);
  }
  SUBCASE("shares, medians and CSV rows") {
    bench::QuickNetOptions o;
    o.layers = {2, 2};
    o.filters = {32, 64};
    o.input_size = 64;
    o.classes = 10;
    const ExecutionPlan plan = plan_for(bench::quicknet_like(o, 4));
    Rng rng(27);
    const Profile p =
        profile(plan, {testing::random_normal(rng, plan.graph().tensor(plan.graph().inputs[0]).nhwc())},
                15, 2);
    REQUIRE(p.records.size() == plan.ops().size());
    double pct = 0.0;
    double sum = 0.0;
    for (size_t i = 0; i < p.records.size(); ++i) {
      const ProfileRecord& r = p.records[i];
      pct += r.pct;
      sum += r.median_us;
      CHECK(r.layer == static_cast<int>(i));
      CHECK(r.op == plan.ops()[i].id);
      if (r.kind == "BConv2D") {
        CHECK(r.macs_binary > 0);
        CHECK(r.accumulate_us + r.transform_us <= r.median_us * 1.5 + 1.0);
      }
    }
    CHECK(pct == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(sum == doctest::Approx(p.sum_of_medians_us));
    CHECK(p.sum_of_medians_us <= 1.1 * p.end_to_end_median_us);

    double category_pct = 0.0;
    for (const CategoryShare& c : category_breakdown(p)) category_pct += c.pct;
    CHECK(category_pct == doctest::Approx(100.0));

    const std::string csv = profile_csv(p);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "op,kind,layer,median_us,pct,macs_binary,macs_float");
    size_t rows = 0;
    while (std::getline(lines, line)) {
      if (!line.empty()) ++rows;
    }
    CHECK(rows == plan.ops().size());
  }
  SUBCASE("median") {
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
  }
}

TEST_CASE("load errors") {
  const std::vector<uint8_t> garbage = {'n', 'o', 'p', 'e', 0, 0, 0, 0};
  CHECK_THROWS_AS(load_model(garbage), LoadError);
  // A training graph written as a model is not in runtime form.
  bench::SingleConvOptions o;
  const std::vector<uint8_t> raw = converter::write_model(bench::single_conv(o, 5));
  CHECK_THROWS_AS(load_model(raw), Error);
}

}  // namespace
}  // namespace binconv::runtime
