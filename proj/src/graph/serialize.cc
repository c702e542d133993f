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

#include "binconv/graph/serialize.h"

#include <bit>
#include <cstring>
#include <initializer_list>

#include "binconv/core/base64.h"
#include "binconv/core/error.h"
#include "binconv/graph/validate.h"
#include "json.hpp"

namespace binconv::graph {

static_assert(std::endian::native == std::endian::little,
              "payload encoding assumes a little-endian host");

using json = nlohmann::json;

namespace {

template <typename T>
std::string encode_payload(const std::vector<T>& values) {
  std::span<const uint8_t> bytes(reinterpret_cast<const uint8_t*>(values.data()),
                                 values.size() * sizeof(T));
  return base64_encode(bytes);
}

template <typename T>
std::vector<T> decode_payload(const std::string& text, int64_t expected,
                              TensorId id) {
  std::vector<uint8_t> bytes;
  try {
    bytes = base64_decode(text);
  } catch (const Error& e) {
    throw GraphError("", "tensor " + std::to_string(id) + ": " + e.what());
  }
  if (static_cast<int64_t>(bytes.size()) != expected * int64_t{sizeof(T)}) {
    throw GraphError("", "tensor " + std::to_string(id) + ": payload has " +
                             std::to_string(bytes.size()) + " bytes, shape needs " +
                             std::to_string(expected * sizeof(T)));
  }
  std::vector<T> values(expected);
  std::memcpy(values.data(), bytes.data(), bytes.size());
  return values;
}

std::string_view padding_name(BConvPadding p) {
  switch (p) {
    case BConvPadding::kValid: return "valid";
    case BConvPadding::kOne: return "one";
    case BConvPadding::kZero: return "zero";
    case BConvPadding::kZeroCorrected: return "zero_corrected";
  }
  return "?";
}

std::string_view activation_name(kernels::ActivationKind a) {
  switch (a) {
    case kernels::ActivationKind::kNone: return "none";
    case kernels::ActivationKind::kRelu: return "relu";
    case kernels::ActivationKind::kClampedRelu: return "clamped_relu";
  }
  return "?";
}

json floats_json(const std::vector<float>& v) {
  json arr = json::array();
  for (float f : v) arr.push_back(static_cast<double>(f));
  return arr;
}

json doubles_json(const std::vector<double>& v) { return json(v); }

json attrs_json(const Node& n) {
  json a = json::object();
  std::visit(
      [&](const auto& attrs) {
        using T = std::decay_t<decltype(attrs)>;
        if constexpr (std::is_same_v<T, Conv2DAttrs>) {
          a["stride"] = {attrs.stride_h, attrs.stride_w};
          a["padding"] = attrs.same_padding ? "same" : "valid";
          a["pad_value"] = attrs.pad_value == 1.0f ? "one" : "zero";
          if (!attrs.multiplier.empty()) a["multiplier"] = doubles_json(attrs.multiplier);
          if (!attrs.bias.empty()) a["bias"] = doubles_json(attrs.bias);
        } else if constexpr (std::is_same_v<T, BConv2DAttrs>) {
          a["stride"] = {attrs.stride_h, attrs.stride_w};
          a["padding"] = padding_name(attrs.padding);
          a["activation"] = activation_name(attrs.activation.kind);
          if (attrs.activation.kind == kernels::ActivationKind::kClampedRelu) {
            a["cap"] = static_cast<double>(attrs.activation.cap);
          }
          a["multiplier"] = doubles_json(attrs.multiplier);
          a["bias"] = doubles_json(attrs.bias);
          a["output"] = attrs.output == kernels::OutputKind::kBitpacked ? "bitpacked"
                                                                        : "float";
          if (attrs.output == kernels::OutputKind::kBitpacked) {
            json tau = json::array(), flip = json::array(), constant = json::array();
            for (const auto& t : attrs.thresholds.channels) {
              tau.push_back(t.tau);
              flip.push_back(t.flip);
              constant.push_back(t.constant ? json(*t.constant) : json(nullptr));
            }
            a["thresholds"] = {{"tau", tau}, {"flip", flip}, {"constant", constant}};
          }
        } else if constexpr (std::is_same_v<T, PoolAttrs>) {
          a["pool"] = {attrs.params.pool_h, attrs.params.pool_w};
          a["stride"] = {attrs.params.stride_h, attrs.params.stride_w};
          a["padding"] = attrs.params.same_padding ? "same" : "valid";
        } else if constexpr (std::is_same_v<T, BatchNormAttrs>) {
          a["gamma"] = floats_json(attrs.gamma);
          a["beta"] = floats_json(attrs.beta);
          a["mean"] = floats_json(attrs.mean);
          a["variance"] = floats_json(attrs.variance);
          a["epsilon"] = static_cast<double>(attrs.epsilon);
        } else if constexpr (std::is_same_v<T, ReluAttrs>) {
          if (attrs.cap >= 0) a["cap"] = static_cast<double>(attrs.cap);
        }
      },
      n.attrs);
  return a;
}

// ---- decoding ------------------------------------------------------------

class Decoder {
 public:
  explicit Decoder(std::string node) : node_(std::move(node)) {}

  [[noreturn]] void fail(const std::string& reason) const {
    throw GraphError(node_, reason);
  }

  void keys(const json& obj, std::initializer_list<std::string_view> allowed,
            const std::string& what) const {
    if (!obj.is_object()) fail(what + " must be an object");
    for (const auto& item : obj.items()) {
      bool ok = false;
      for (std::string_view k : allowed) ok = ok || k == item.key();
      if (!ok) fail("unknown key '" + item.key() + "' in " + what);
    }
  }

  const json& required(const json& obj, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing key '") + key + "'");
    return *it;
  }

  int integer(const json& v, const std::string& what) const {
    if (!v.is_number_integer()) fail(what + " must be an integer");
    return v.get<int>();
  }

  float number(const json& v, const std::string& what) const {
    if (!v.is_number()) fail(what + " must be a number");
    return static_cast<float>(v.get<double>());
  }

  std::string string(const json& v, const std::string& what) const {
    if (!v.is_string()) fail(what + " must be a string");
    return v.get<std::string>();
  }

  std::vector<float> floats(const json& v, const std::string& what) const {
    const std::vector<double> d = doubles(v, what);
    return {d.begin(), d.end()};
  }

  std::vector<double> doubles(const json& v, const std::string& what) const {
    if (!v.is_array()) fail(what + " must be an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number()) fail(what + " must be a number");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::pair<int, int> pair(const json& obj, const char* key,
                           std::pair<int, int> fallback) const {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_array() || it->size() != 2) {
      fail(std::string(key) + " must be a two-element array");
    }
    return {integer((*it)[0], key), integer((*it)[1], key)};
  }

  template <typename Enum>
  Enum choice(const json& obj, const char* key, Enum fallback,
              std::initializer_list<std::pair<std::string_view, Enum>> options) const {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    const std::string s = string(*it, key);
    for (const auto& [name, value] : options) {
      if (name == s) return value;
    }
    fail("invalid value '" + s + "' for " + key);
  }

 private:
  std::string node_;
};

Attrs decode_attrs(OpKind op, const json& a, const Decoder& d) {
  switch (op) {
    case OpKind::kConv2D: {
      d.keys(a, {"stride", "padding", "pad_value", "multiplier", "bias"}, "Conv2D attrs");
      Conv2DAttrs c;
      std::tie(c.stride_h, c.stride_w) = d.pair(a, "stride", {1, 1});
      c.same_padding = d.choice(a, "padding", false, {{"valid", false}, {"same", true}});
      c.pad_value = d.choice(a, "pad_value", 0.0f, {{"zero", 0.0f}, {"one", 1.0f}});
      if (a.contains("multiplier")) c.multiplier = d.doubles(a["multiplier"], "multiplier");
      if (a.contains("bias")) c.bias = d.doubles(a["bias"], "bias");
      return c;
    }
    case OpKind::kBConv2D: {
      d.keys(a, {"stride", "padding", "activation", "cap", "multiplier", "bias",
                 "output", "thresholds"},
             "BConv2D attrs");
      BConv2DAttrs b;
      std::tie(b.stride_h, b.stride_w) = d.pair(a, "stride", {1, 1});
      b.padding = d.choice(a, "padding", BConvPadding::kOne,
                           {{"valid", BConvPadding::kValid},
                            {"one", BConvPadding::kOne},
                            {"zero", BConvPadding::kZero},
                            {"zero_corrected", BConvPadding::kZeroCorrected}});
      using AK = kernels::ActivationKind;
      b.activation.kind = d.choice(a, "activation", AK::kNone,
                                   {{"none", AK::kNone},
                                    {"relu", AK::kRelu},
                                    {"clamped_relu", AK::kClampedRelu}});
      if (a.contains("cap")) b.activation.cap = d.number(a["cap"], "cap");
      if (a.contains("multiplier")) b.multiplier = d.doubles(a["multiplier"], "multiplier");
      if (a.contains("bias")) b.bias = d.doubles(a["bias"], "bias");
      using OK = kernels::OutputKind;
      b.output = d.choice(a, "output", OK::kFloat,
                          {{"float", OK::kFloat}, {"bitpacked", OK::kBitpacked}});
      if (a.contains("thresholds")) {
        const json& t = a["thresholds"];
        d.keys(t, {"tau", "flip", "constant"}, "thresholds");
        const json& tau = d.required(t, "tau");
        const json& flip = d.required(t, "flip");
        const json& constant = d.required(t, "constant");
        if (!tau.is_array() || !flip.is_array() || !constant.is_array() ||
            tau.size() != flip.size() || tau.size() != constant.size()) {
          d.fail("thresholds arrays must have equal length");
        }
        for (size_t i = 0; i < tau.size(); ++i) {
          kernels::ChannelThreshold ct;
          if (!tau[i].is_number()) d.fail("thresholds.tau must be numbers");
          ct.tau = tau[i].get<double>();
          if (!flip[i].is_boolean()) d.fail("thresholds.flip must be booleans");
          ct.flip = flip[i].get<bool>();
          if (constant[i].is_boolean()) {
            ct.constant = constant[i].get<bool>();
          } else if (!constant[i].is_null()) {
            d.fail("thresholds.constant entries must be null or boolean");
          }
          b.thresholds.channels.push_back(ct);
        }
      }
      return b;
    }
    case OpKind::kMaxPool2D:
    case OpKind::kBMaxPool2D: {
      d.keys(a, {"pool", "stride", "padding"}, "pool attrs");
      PoolAttrs p;
      std::tie(p.params.pool_h, p.params.pool_w) = d.pair(a, "pool", {2, 2});
      std::tie(p.params.stride_h, p.params.stride_w) =
          d.pair(a, "stride", {p.params.pool_h, p.params.pool_w});
      p.params.same_padding =
          d.choice(a, "padding", false, {{"valid", false}, {"same", true}});
      return p;
    }
    case OpKind::kBatchNorm: {
      d.keys(a, {"gamma", "beta", "mean", "variance", "epsilon"}, "BatchNorm attrs");
      BatchNormAttrs bn;
      bn.gamma = d.floats(d.required(a, "gamma"), "gamma");
      bn.beta = d.floats(d.required(a, "beta"), "beta");
      bn.mean = d.floats(d.required(a, "mean"), "mean");
      bn.variance = d.floats(d.required(a, "variance"), "variance");
      if (a.contains("epsilon")) bn.epsilon = d.number(a["epsilon"], "epsilon");
      return bn;
    }
    case OpKind::kReLU: {
      d.keys(a, {"cap"}, "ReLU attrs");
      ReluAttrs r;
      if (a.contains("cap")) r.cap = d.number(a["cap"], "cap");
      return r;
    }
    default:
      d.keys(a, {}, std::string(to_string(op)) + " attrs");
      return NoAttrs{};
  }
}

std::vector<TensorId> decode_ids(const json& v, const Decoder& d,
                                 const std::string& what) {
  if (!v.is_array()) d.fail(what + " must be an array of tensor ids");
  std::vector<TensorId> ids;
  for (const json& x : v) {
    if (!x.is_number_unsigned()) d.fail(what + " must hold non-negative integers");
    ids.push_back(x.get<TensorId>());
  }
  return ids;
}

DType decode_dtype(const std::string& s, const Decoder& d) {
  if (s == "f32") return DType::kF32;
  if (s == "bitpacked") return DType::kBitpacked;
  if (s == "i32") return DType::kI32;
  d.fail("unknown dtype '" + s + "'");
}

}  // namespace

std::string serialize(const Graph& g, const SerializeOptions& options) {
  json doc;
  doc["version"] = kGraphSchemaVersion;
  json tensors = json::array();
  for (const auto& [id, t] : g.tensors) {
    json jt;
    jt["id"] = id;
    jt["dtype"] = to_string(t.dtype);
    jt["shape"] = t.shape;
    if (t.binary) jt["binary"] = true;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::vector<uint32_t>>) {
            if (options.inline_bitpacked) jt["data"] = encode_payload(v);
          } else if constexpr (!std::is_same_v<T, std::monostate>) {
            jt["data"] = encode_payload(v);
          }
        },
        t.data);
    tensors.push_back(std::move(jt));
  }
  doc["tensors"] = std::move(tensors);
  json nodes = json::array();
  for (const Node& n : g.nodes) {
    nodes.push_back({{"id", n.id},
                     {"op", to_string(n.op)},
                     {"inputs", n.inputs},
                     {"outputs", n.outputs},
                     {"attrs", attrs_json(n)}});
  }
  doc["nodes"] = std::move(nodes);
  doc["inputs"] = g.inputs;
  doc["outputs"] = g.outputs;
  return doc.dump(1) + "\n";
}

Graph decode_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GraphError("", std::string("document is not valid JSON: ") + e.what());
  }
  const Decoder top("");
  top.keys(doc, {"version", "tensors", "nodes", "inputs", "outputs"}, "document");
  if (top.integer(top.required(doc, "version"), "version") != kGraphSchemaVersion) {
    top.fail("unsupported schema version");
  }

  Graph g;
  const json& tensors = top.required(doc, "tensors");
  if (!tensors.is_array()) top.fail("tensors must be an array");
  for (const json& jt : tensors) {
    top.keys(jt, {"id", "dtype", "shape", "binary", "data"}, "tensor");
    const json& jid = top.required(jt, "id");
    if (!jid.is_number_unsigned()) top.fail("tensor id must be a non-negative integer");
    TensorDef t;
    t.id = jid.get<TensorId>();
    const Decoder d("");
    if (g.has_tensor(t.id)) d.fail("duplicate tensor id " + std::to_string(t.id));
    t.dtype = decode_dtype(d.string(d.required(jt, "dtype"), "dtype"), d);
    if (jt.contains("shape")) {
      if (!jt["shape"].is_array()) d.fail("tensor shape must be an array");
      for (const json& x : jt["shape"]) {
        const int dim = d.integer(x, "shape entry");
        if (dim < 1) d.fail("tensor " + std::to_string(t.id) + " has a non-positive dimension");
        t.shape.push_back(dim);
      }
    }
    if (jt.contains("binary")) {
      if (!jt["binary"].is_boolean()) d.fail("binary must be a boolean");
      t.binary = jt["binary"].get<bool>();
    }
    if (jt.contains("data")) {
      if (t.shape.empty()) d.fail("constant tensor " + std::to_string(t.id) + " needs a shape");
      const std::string payload = d.string(jt["data"], "data");
      switch (t.dtype) {
        case DType::kF32:
          t.data = decode_payload<float>(payload, t.storage_words(), t.id);
          break;
        case DType::kBitpacked:
          t.data = decode_payload<uint32_t>(payload, t.storage_words(), t.id);
          break;
        case DType::kI32:
          t.data = decode_payload<int32_t>(payload, t.storage_words(), t.id);
          break;
      }
    }
    g.tensors.emplace(t.id, std::move(t));
  }

  const json& nodes = top.required(doc, "nodes");
  if (!nodes.is_array()) top.fail("nodes must be an array");
  for (const json& jn : nodes) {
    top.keys(jn, {"id", "op", "inputs", "outputs", "attrs"}, "node");
    Node n;
    n.id = top.string(top.required(jn, "id"), "node id");
    const Decoder d(n.id);
    if (g.find_node(n.id) >= 0) d.fail("duplicate node id");
    try {
      n.op = op_from_string(d.string(d.required(jn, "op"), "op"));
    } catch (const GraphError& e) {
      d.fail(e.what());
    }
    n.inputs = decode_ids(d.required(jn, "inputs"), d, "inputs");
    n.outputs = decode_ids(d.required(jn, "outputs"), d, "outputs");
    for (TensorId id : n.inputs) {
      if (!g.has_tensor(id)) d.fail("dangling input tensor id " + std::to_string(id));
    }
    for (TensorId id : n.outputs) {
      if (!g.has_tensor(id)) d.fail("dangling output tensor id " + std::to_string(id));
    }
    n.attrs = decode_attrs(n.op, jn.contains("attrs") ? jn["attrs"] : json::object(), d);
    g.nodes.push_back(std::move(n));
  }

  g.inputs = decode_ids(top.required(doc, "inputs"), top, "inputs");
  g.outputs = decode_ids(top.required(doc, "outputs"), top, "outputs");
  for (TensorId id : g.inputs) {
    if (!g.has_tensor(id)) top.fail("dangling graph input id " + std::to_string(id));
  }
  for (TensorId id : g.outputs) {
    if (!g.has_tensor(id)) top.fail("dangling graph output id " + std::to_string(id));
  }
  return g;
}

Graph parse_training_graph(std::string_view text) {
  Graph g = decode_graph(text);
  check_graph(g);
  return g;
}

}  // namespace binconv::graph
