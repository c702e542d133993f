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

#ifndef BINCONV_GRAPH_GRAPH_H_
#define BINCONV_GRAPH_GRAPH_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "binconv/core/tensor.h"
#include "binconv/kernels/bconv.h"
#include "binconv/kernels/float_ops.h"

namespace binconv::graph {

using TensorId = uint32_t;

enum class DType { kF32, kBitpacked, kI32 };

std::string_view to_string(DType dtype);

using TensorData = std::variant<std::monostate, std::vector<float>,
                                std::vector<uint32_t>, std::vector<int32_t>>;

struct TensorDef {
  TensorId id = 0;
  DType dtype = DType::kF32;
  std::vector<int> shape;  // empty until declared or inferred
  bool binary = false;     // float weights that encode +-1 values
  TensorData data;         // monostate for activations

  bool is_constant() const { return data.index() != 0; }
  int64_t elements() const;
  // Storage size; bitpacked tensors pack the last axis 32 per word.
  int64_t storage_words() const;
  size_t byte_size() const { return 4 * static_cast<size_t>(storage_words()); }
  // Rank-4 shapes map directly; lower ranks are right-aligned into NHWC.
  Shape nhwc() const;

  const std::vector<float>& floats() const;
  const std::vector<uint32_t>& words() const;
  const std::vector<int32_t>& ints() const;
};

enum class OpKind {
  kSign,
  kConv2D,
  kBConv2D,
  kBMaxPool2D,
  kMaxPool2D,
  kBatchNorm,
  kReLU,
  kAdd,
  kDense,
  kGlobalAvgPool,
  kQuantize,
  kDequantize,
};

std::string_view to_string(OpKind op);
// Throws GraphError for unknown names.
OpKind op_from_string(std::string_view name);

struct NoAttrs {
  friend bool operator==(const NoAttrs&, const NoAttrs&) = default;
};

struct Conv2DAttrs {
  int stride_h = 1;
  int stride_w = 1;
  bool same_padding = false;
  float pad_value = 0.0f;          // 0 or 1
  // Per output channel, applied after the sum: out = multiplier * sum +
  // bias input + bias. Empty means 1 and 0. Folding writes these.
  std::vector<double> multiplier;
  std::vector<double> bias;

  friend bool operator==(const Conv2DAttrs&, const Conv2DAttrs&) = default;
};

// Graph-level padding of a binary convolution. kZero is the declaration a
// training graph carries before padding legalization turns it into
// kZeroCorrected plus a correction tensor.
enum class BConvPadding { kValid, kOne, kZero, kZeroCorrected };

struct BConv2DAttrs {
  int stride_h = 1;
  int stride_w = 1;
  BConvPadding padding = BConvPadding::kOne;
  kernels::Activation activation;
  std::vector<double> multiplier;
  std::vector<double> bias;
  kernels::OutputKind output = kernels::OutputKind::kFloat;
  kernels::ThresholdSet thresholds;

  bool same_padding() const { return padding != BConvPadding::kValid; }
  friend bool operator==(const BConv2DAttrs&, const BConv2DAttrs&) = default;
};

struct PoolAttrs {
  kernels::PoolParams params;

  friend bool operator==(const PoolAttrs& a, const PoolAttrs& b) {
    return a.params.pool_h == b.params.pool_h &&
           a.params.pool_w == b.params.pool_w &&
           a.params.stride_h == b.params.stride_h &&
           a.params.stride_w == b.params.stride_w &&
           a.params.same_padding == b.params.same_padding;
  }
};

struct BatchNormAttrs {
  std::vector<float> gamma;
  std::vector<float> beta;
  std::vector<float> mean;
  std::vector<float> variance;
  float epsilon = 1e-3f;

  friend bool operator==(const BatchNormAttrs&, const BatchNormAttrs&) = default;
};

struct ReluAttrs {
  float cap = -1.0f;  // negative: unbounded

  friend bool operator==(const ReluAttrs&, const ReluAttrs&) = default;
};

using Attrs = std::variant<NoAttrs, Conv2DAttrs, BConv2DAttrs, PoolAttrs,
                           BatchNormAttrs, ReluAttrs>;

// The attribute alternative an op kind carries.
Attrs default_attrs(OpKind op);

struct Node {
  std::string id;
  OpKind op = OpKind::kSign;
  std::vector<TensorId> inputs;
  std::vector<TensorId> outputs;
  Attrs attrs;

  template <typename T>
  T& attr() { return std::get<T>(attrs); }
  template <typename T>
  const T& attr() const { return std::get<T>(attrs); }
};

class Graph {
 public:
  std::map<TensorId, TensorDef> tensors;
  std::vector<Node> nodes;
  std::vector<TensorId> inputs;
  std::vector<TensorId> outputs;

  bool has_tensor(TensorId id) const { return tensors.count(id) != 0; }
  TensorDef& tensor(TensorId id);
  const TensorDef& tensor(TensorId id) const;

  TensorId next_tensor_id() const;
  TensorId add_tensor(DType dtype, std::vector<int> shape = {},
                      TensorData data = {});

  // Index of the node producing `id`, or -1.
  int producer(TensorId id) const;
  // Indices of nodes reading `id`, in node order.
  std::vector<int> consumers(TensorId id) const;
  bool is_output(TensorId id) const;
  bool is_input(TensorId id) const;

  int find_node(std::string_view id) const;
  std::string unique_node_id(const std::string& base) const;

  // Drops tensors no node, input or output refers to.
  void remove_unused_tensors();
};

kernels::BConvDescriptor make_bconv_descriptor(const BConv2DAttrs& attrs,
                                               const std::vector<int>& weight_shape);
kernels::Conv2DParams make_conv_params(const Conv2DAttrs& attrs);
kernels::BatchNormParams make_batch_norm_params(const BatchNormAttrs& attrs);

}  // namespace binconv::graph

#endif  // BINCONV_GRAPH_GRAPH_H_
