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

#include <cstring>
#include <json.hpp>
#include <string>

#include "binconv/bench/factory.h"
#include "binconv/core/base64.h"
#include "binconv/core/error.h"
#include "binconv/graph/serialize.h"
#include "binconv/graph/validate.h"

namespace binconv::graph {
namespace {

using nlohmann::json;

std::string float_payload(const std::vector<float>& v) {
  std::vector<uint8_t> bytes(v.size() * 4);
  std::memcpy(bytes.data(), v.data(), bytes.size());
  return base64_encode(bytes);
}

json tensor(int id, std::vector<int> shape, const char* dtype = "f32") {
  return {{"id", id}, {"dtype", dtype}, {"shape", shape}};
}

json node(const char* id, const char* op, std::vector<int> in, std::vector<int> out,
          json attrs = json::object()) {
  return {{"id", id}, {"op", op}, {"inputs", in}, {"outputs", out}, {"attrs", attrs}};
}

json conv_attrs() { return {{"stride", {1, 1}}, {"padding", "same"}, {"pad_value", "one"}}; }

// x[1,4,4,2] -> Sign -> Conv2D(binary 3x3, 2 -> 3) -> BatchNorm
json sign_conv_bn() {
  json w = tensor(2, {3, 3, 3, 2});
  w["binary"] = true;
  std::vector<float> values(54);
  for (size_t i = 0; i < values.size(); ++i) values[i] = i % 3 ? 1.0f : -1.0f;
  w["data"] = float_payload(values);
  json bn = {{"gamma", {1, 1, 1}}, {"beta", {0, 0, 0}}, {"mean", {0, 0, 0}},
             {"variance", {1, 1, 1}}, {"epsilon", 0.001}};
  return {{"version", 1},
          {"tensors", {tensor(0, {1, 4, 4, 2}), tensor(1, {}), w, tensor(3, {}), tensor(4, {})}},
          {"nodes",
           {node("sign", "Sign", {0}, {1}), node("conv", "Conv2D", {1, 2}, {3}, conv_attrs()),
            node("bn", "BatchNorm", {3}, {4}, bn)}},
          {"inputs", {0}},
          {"outputs", {4}}};
}

TEST_CASE("single float conv parses to one node") {
  json w = tensor(1, {4, 1, 1, 3});
  w["data"] = float_payload(std::vector<float>(12, 0.5f));
  const json doc = {{"version", 1},
                    {"tensors", {tensor(0, {1, 2, 2, 3}), w, tensor(2, {})}},
                    {"nodes", {node("c", "Conv2D", {0, 1}, {2},
                                    {{"stride", {1, 1}}, {"padding", "valid"}})}},
                    {"inputs", {0}},
                    {"outputs", {2}}};
  const Graph g = parse_training_graph(doc.dump());
  REQUIRE(g.nodes.size() == 1);
  CHECK(g.nodes[0].op == OpKind::kConv2D);
  CHECK_FALSE(g.tensor(1).binary);
  CHECK(g.tensor(2).shape == std::vector<int>{1, 2, 2, 4});
}

TEST_CASE("Sign nodes survive parsing") {
  const Graph g = parse_training_graph(sign_conv_bn().dump());
  REQUIRE(g.nodes.size() == 3);
  CHECK(g.nodes[0].op == OpKind::kSign);
  CHECK(g.tensor(2).binary);
  CHECK(g.tensor(4).shape == std::vector<int>{1, 4, 4, 3});
}

TEST_CASE("a cycle is reported with the nodes on it") {
  const json doc = {{"version", 1},
                    {"tensors", {tensor(0, {1, 2, 2, 1}), tensor(1, {}), tensor(2, {}),
                                 tensor(3, {})}},
                    {"nodes", {node("A", "Add", {0, 2}, {1}), node("B", "ReLU", {1}, {2}),
                               node("C", "ReLU", {0}, {3})}},
                    {"inputs", {0}},
                    {"outputs", {3}}};
  try {
    parse_training_graph(doc.dump());
    FAIL("expected a cycle error");
  } catch (const GraphError& e) {
    const std::string what = e.what();
    CHECK(what.find("cycle") != std::string::npos);
    CHECK(what.find("A") != std::string::npos);
    CHECK(what.find("B") != std::string::npos);
  }
}

TEST_CASE("schema violations name the node") {
  json doc = sign_conv_bn();
  doc["nodes"][1]["attrs"]["dilation"] = 2;
  CHECK_THROWS_WITH_AS(parse_training_graph(doc.dump()),
                       doctest::Contains("unknown key 'dilation'"), GraphError);
  doc = sign_conv_bn();
  doc["nodes"][2]["inputs"] = {9};
  CHECK_THROWS_AS(parse_training_graph(doc.dump()), GraphError);
  doc = sign_conv_bn();
  doc["nodes"][0]["op"] = "Softmax";
  CHECK_THROWS_AS(parse_training_graph(doc.dump()), GraphError);
  doc = sign_conv_bn();
  doc["version"] = 2;
  CHECK_THROWS_AS(parse_training_graph(doc.dump()), GraphError);
}

TEST_CASE("validation diagnostics") {
  SUBCASE("factory graph is valid") {
    bench::QuickNetOptions o;
    o.layers = {1, 1};
    o.filters = {8, 16};
    o.input_size = 16;
    o.classes = 10;
    Graph g = bench::quicknet_like(o, 3);
    CHECK(validate(g).empty());
  }
  SUBCASE("BConv2D fed a float tensor") {
    Graph g = decode_graph(sign_conv_bn().dump());
    Node& conv = g.nodes[1];
    BConv2DAttrs a;
    a.multiplier.assign(3, 1.0);
    a.bias.assign(3, 0.0);
    conv.op = OpKind::kBConv2D;
    conv.attrs = a;
    conv.inputs[0] = 0;
    const auto d = validate(g);
    REQUIRE_FALSE(d.empty());
    CHECK(d[0].node == "conv");
    CHECK(d[0].message.find("expected bitpacked input") != std::string::npos);
  }
  SUBCASE("Add of mismatched shapes") {
    const json doc = {{"version", 1},
                      {"tensors", {tensor(0, {1, 2, 2, 3}), tensor(1, {1, 2, 2, 4}),
                                   tensor(2, {})}},
                      {"nodes", {node("add", "Add", {0, 1}, {2})}},
                      {"inputs", {0, 1}},
                      {"outputs", {2}}};
    Graph g = decode_graph(doc.dump());
    const auto d = validate(g);
    REQUIRE_FALSE(d.empty());
    CHECK(d[0].node == "add");
    CHECK(d[0].message.find("[1,2,2,3]") != std::string::npos);
    CHECK(d[0].message.find("[1,2,2,4]") != std::string::npos);
  }
  SUBCASE("negative variance") {
    json doc = sign_conv_bn();
    doc["nodes"][2]["attrs"]["variance"] = {1, -1, 1};
    Graph g = decode_graph(doc.dump());
    const auto d = validate(g);
    REQUIRE_FALSE(d.empty());
    CHECK(d[0].node == "bn");
  }
}

TEST_CASE("parse, serialize, parse is stable") {
  bench::SingleConvOptions o;
  o.relu = o.batch_norm = o.binary_output = o.maxpool_before = true;
  const Graph a = parse_training_graph(serialize(bench::single_conv(o, 5)));
  const std::string text = serialize(a);
  const Graph b = parse_training_graph(text);
  CHECK(serialize(b) == text);
  CHECK(b.nodes.size() == a.nodes.size());
  for (size_t i = 0; i < a.nodes.size(); ++i) CHECK(a.nodes[i].attrs == b.nodes[i].attrs);
}

TEST_CASE("topological sort keeps a sorted graph and orders a shuffled one") {
  Graph g = decode_graph(sign_conv_bn().dump());
  std::swap(g.nodes[0], g.nodes[2]);
  sort_topologically(g);
  CHECK(g.nodes[0].id == "sign");
  CHECK(g.nodes[1].id == "conv");
  CHECK(g.nodes[2].id == "bn");
  sort_topologically(g);
  CHECK(g.nodes[0].id == "sign");
}

}  // namespace
}  // namespace binconv::graph
