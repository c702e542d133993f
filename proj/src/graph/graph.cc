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

#include "binconv/graph/graph.h"

#include <algorithm>
#include <array>
#include <set>

#include "binconv/core/error.h"

namespace binconv::graph {

namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 12> kOpNames = {{
    {OpKind::kSign, "Sign"},
    {OpKind::kConv2D, "Conv2D"},
    {OpKind::kBConv2D, "BConv2D"},
    {OpKind::kBMaxPool2D, "BMaxPool2D"},
    {OpKind::kMaxPool2D, "MaxPool2D"},
    {OpKind::kBatchNorm, "BatchNorm"},
    {OpKind::kReLU, "ReLU"},
    {OpKind::kAdd, "Add"},
    {OpKind::kDense, "Dense"},
    {OpKind::kGlobalAvgPool, "GlobalAvgPool"},
    {OpKind::kQuantize, "Quantize"},
    {OpKind::kDequantize, "Dequantize"},
}};

}  // namespace

std::string_view to_string(DType dtype) {
  switch (dtype) {
    case DType::kF32: return "f32";
    case DType::kBitpacked: return "bitpacked";
    case DType::kI32: return "i32";
  }
  return "?";
}

std::string_view to_string(OpKind op) {
  for (const auto& [kind, name] : kOpNames) {
    if (kind == op) return name;
  }
  return "?";
}

OpKind op_from_string(std::string_view name) {
  for (const auto& [kind, n] : kOpNames) {
    if (n == name) return kind;
  }
  throw GraphError("", "unknown op '" + std::string(name) + "'");
}

int64_t TensorDef::elements() const {
  int64_t e = 1;
  for (int d : shape) e *= d;
  return e;
}

int64_t TensorDef::storage_words() const {
  if (dtype != DType::kBitpacked) return elements();
  if (shape.empty()) return 0;
  int64_t outer = 1;
  for (size_t i = 0; i + 1 < shape.size(); ++i) outer *= shape[i];
  return outer * packed_words(shape.back());
}

Shape TensorDef::nhwc() const {
  std::array<int, 4> dims = {1, 1, 1, 1};
  const size_t rank = std::min<size_t>(shape.size(), 4);
  for (size_t i = 0; i < rank; ++i) dims[4 - rank + i] = shape[shape.size() - rank + i];
  return {dims[0], dims[1], dims[2], dims[3]};
}

const std::vector<float>& TensorDef::floats() const {
  if (const auto* v = std::get_if<std::vector<float>>(&data)) return *v;
  throw GraphError("", "tensor " + std::to_string(id) + " has no float data");
}

const std::vector<uint32_t>& TensorDef::words() const {
  if (const auto* v = std::get_if<std::vector<uint32_t>>(&data)) return *v;
  throw GraphError("", "tensor " + std::to_string(id) + " has no bitpacked data");
}

const std::vector<int32_t>& TensorDef::ints() const {
  if (const auto* v = std::get_if<std::vector<int32_t>>(&data)) return *v;
  throw GraphError("", "tensor " + std::to_string(id) + " has no integer data");
}

Attrs default_attrs(OpKind op) {
  switch (op) {
    case OpKind::kConv2D: return Conv2DAttrs{};
    case OpKind::kBConv2D: return BConv2DAttrs{};
    case OpKind::kBMaxPool2D:
    case OpKind::kMaxPool2D: return PoolAttrs{};
    case OpKind::kBatchNorm: return BatchNormAttrs{};
    case OpKind::kReLU: return ReluAttrs{};
    default: return NoAttrs{};
  }
}

TensorDef& Graph::tensor(TensorId id) {
  auto it = tensors.find(id);
  if (it == tensors.end()) {
    throw GraphError("", "unknown tensor id " + std::to_string(id));
  }
  return it->second;
}

const TensorDef& Graph::tensor(TensorId id) const {
  auto it = tensors.find(id);
  if (it == tensors.end()) {
    throw GraphError("", "unknown tensor id " + std::to_string(id));
  }
  return it->second;
}

TensorId Graph::next_tensor_id() const {
  return tensors.empty() ? 0 : tensors.rbegin()->first + 1;
}

TensorId Graph::add_tensor(DType dtype, std::vector<int> shape, TensorData data) {
  const TensorId id = next_tensor_id();
  TensorDef& t = tensors[id];
  t.id = id;
  t.dtype = dtype;
  t.shape = std::move(shape);
  t.data = std::move(data);
  return id;
}

int Graph::producer(TensorId id) const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (TensorId out : nodes[i].outputs) {
      if (out == id) return static_cast<int>(i);
    }
  }
  return -1;
}

std::vector<int> Graph::consumers(TensorId id) const {
  std::vector<int> result;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (std::find(nodes[i].inputs.begin(), nodes[i].inputs.end(), id) !=
        nodes[i].inputs.end()) {
      result.push_back(static_cast<int>(i));
    }
  }
  return result;
}

bool Graph::is_output(TensorId id) const {
  return std::find(outputs.begin(), outputs.end(), id) != outputs.end();
}

bool Graph::is_input(TensorId id) const {
  return std::find(inputs.begin(), inputs.end(), id) != inputs.end();
}

int Graph::find_node(std::string_view id) const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

std::string Graph::unique_node_id(const std::string& base) const {
  if (find_node(base) < 0) return base;
  for (int k = 1;; ++k) {
    std::string candidate = base + "_" + std::to_string(k);
    if (find_node(candidate) < 0) return candidate;
  }
}

void Graph::remove_unused_tensors() {
  std::set<TensorId> used(inputs.begin(), inputs.end());
  used.insert(outputs.begin(), outputs.end());
  for (const Node& n : nodes) {
    used.insert(n.inputs.begin(), n.inputs.end());
    used.insert(n.outputs.begin(), n.outputs.end());
  }
  std::erase_if(tensors, [&](const auto& kv) { return !used.count(kv.first); });
}

kernels::BConvDescriptor make_bconv_descriptor(const BConv2DAttrs& attrs,
                                               const std::vector<int>& weight_shape) {
  if (weight_shape.size() != 4) {
    throw ConfigError("bconv weights must have rank 4 (out, kh, kw, in)");
  }
  kernels::BConvDescriptor d;
  d.out_channels = weight_shape[0];
  d.kernel_h = weight_shape[1];
  d.kernel_w = weight_shape[2];
  d.in_channels = weight_shape[3];
  d.stride_h = attrs.stride_h;
  d.stride_w = attrs.stride_w;
  switch (attrs.padding) {
    case BConvPadding::kValid: d.padding = kernels::PaddingMode::kValid; break;
    case BConvPadding::kOne: d.padding = kernels::PaddingMode::kOne; break;
    case BConvPadding::kZero:
    case BConvPadding::kZeroCorrected:
      d.padding = kernels::PaddingMode::kZeroCorrected;
      break;
  }
  d.activation = attrs.activation;
  d.multiplier = attrs.multiplier;
  d.bias = attrs.bias;
  d.output_kind = attrs.output;
  d.thresholds = attrs.thresholds;
  return d;
}

kernels::Conv2DParams make_conv_params(const Conv2DAttrs& attrs) {
  return {attrs.stride_h, attrs.stride_w, attrs.same_padding, attrs.pad_value};
}

kernels::BatchNormParams make_batch_norm_params(const BatchNormAttrs& attrs) {
  return {attrs.gamma, attrs.beta, attrs.mean, attrs.variance, attrs.epsilon};
}

}  // namespace binconv::graph
