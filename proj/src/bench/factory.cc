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

#include "binconv/bench/factory.h"

#include <cmath>
#include <random>

#include "binconv/core/error.h"
#include "binconv/graph/validate.h"

namespace binconv::bench {

using graph::DType;
using graph::Graph;
using graph::Node;
using graph::OpKind;
using graph::TensorId;

namespace {

class Builder {
 public:
  explicit Builder(uint64_t seed) : rng_(seed) {}

  Graph g;

  TensorId input(int batch, int h, int w, int c) {
    const TensorId id = g.add_tensor(DType::kF32, {batch, h, w, c});
    g.inputs.push_back(id);
    return id;
  }

  TensorId constant(std::vector<int> shape, std::vector<float> values, bool binary = false) {
    const TensorId id = g.add_tensor(DType::kF32, std::move(shape), std::move(values));
    g.tensor(id).binary = binary;
    return id;
  }

  TensorId node(OpKind op, std::vector<TensorId> inputs, graph::Attrs attrs,
                const std::string& name) {
    Node n;
    n.id = g.unique_node_id(name);
    n.op = op;
    n.inputs = std::move(inputs);
    n.attrs = std::move(attrs);
    const TensorId out = g.add_tensor(DType::kF32);
    n.outputs = {out};
    g.nodes.push_back(std::move(n));
    return out;
  }

  TensorId sign(TensorId x, const std::string& name) {
    return node(OpKind::kSign, {x}, graph::NoAttrs{}, name);
  }

  // Binary weights are +-1 floats flagged binary; float weights are scaled
  // by 1/sqrt(fan_in).
  TensorId conv(TensorId x, int in_c, int out_c, int kernel, int stride, bool binary,
                bool same, float pad_value, const std::string& name) {
    const size_t count = static_cast<size_t>(out_c) * kernel * kernel * in_c;
    std::vector<float> w(count);
    if (binary) {
      std::bernoulli_distribution coin(0.5);
      for (float& v : w) v = coin(rng_) ? 1.0f : -1.0f;
    } else {
      std::normal_distribution<float> normal(0.0f, 1.0f / std::sqrt(float(kernel * kernel * in_c)));
      for (float& v : w) v = normal(rng_);
    }
    const TensorId wt = constant({out_c, kernel, kernel, in_c}, std::move(w), binary);
    graph::Conv2DAttrs a;
    a.stride_h = a.stride_w = stride;
    a.same_padding = same;
    a.pad_value = pad_value;
    return node(OpKind::kConv2D, {x, wt}, a, name);
  }

  // Running statistics for a pre-BN value with the given mean and variance.
  TensorId batch_norm(TensorId x, int channels, double mean, double variance,
                      const std::string& name) {
    std::uniform_real_distribution<float> gamma(0.5f, 1.5f);
    std::uniform_real_distribution<float> spread(0.5f, 1.5f);
    std::normal_distribution<float> noise(0.0f, 1.0f);
    graph::BatchNormAttrs a;
    const float sd = static_cast<float>(std::sqrt(variance));
    for (int c = 0; c < channels; ++c) {
      a.gamma.push_back(gamma(rng_));
      a.beta.push_back(0.2f * noise(rng_));
      a.mean.push_back(static_cast<float>(mean) + 0.1f * sd * noise(rng_));
      a.variance.push_back(static_cast<float>(variance) * spread(rng_));
    }
    a.epsilon = 1e-3f;
    return node(OpKind::kBatchNorm, {x}, a, name);
  }

  TensorId relu(TensorId x, const std::string& name) {
    return node(OpKind::kReLU, {x}, graph::ReluAttrs{}, name);
  }

  TensorId add(TensorId a, TensorId b, const std::string& name) {
    return node(OpKind::kAdd, {a, b}, graph::NoAttrs{}, name);
  }

  TensorId maxpool(TensorId x, int size, int stride, const std::string& name) {
    graph::PoolAttrs a;
    a.params.pool_h = a.params.pool_w = size;
    a.params.stride_h = a.params.stride_w = stride;
    a.params.same_padding = true;
    return node(OpKind::kMaxPool2D, {x}, a, name);
  }

  TensorId dense(TensorId x, int in_features, int out_features, const std::string& name) {
    std::normal_distribution<float> normal(0.0f, 1.0f / std::sqrt(float(in_features)));
    std::vector<float> w(static_cast<size_t>(out_features) * in_features);
    for (float& v : w) v = normal(rng_);
    std::vector<float> b(out_features);
    for (float& v : b) v = 0.1f * normal(rng_);
    const TensorId wt = constant({out_features, in_features}, std::move(w));
    const TensorId bt = constant({out_features}, std::move(b));
    return node(OpKind::kDense, {x, wt, bt}, graph::NoAttrs{}, name);
  }

  Graph finish(TensorId output) {
    g.outputs = {output};
    graph::check_graph(g);
    return std::move(g);
  }

 private:
  std::mt19937_64 rng_;
};

// Moments of a +-1 dot product of length n over independent signs, before
// and after ReLU.
double dot_variance(int n) { return n; }
double relu_dot_mean(int n) { return std::sqrt(n / (2.0 * M_PI)); }
double relu_dot_variance(int n) { return n * (0.5 - 1.0 / (2.0 * M_PI)); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

Graph quicknet_like(const QuickNetOptions& o, uint64_t seed) {
  require(!o.layers.empty(), "quicknet_like: at least one section is needed");
  require(o.layers.size() == o.filters.size(),
          "quicknet_like: N and k must have the same length");
  for (size_t i = 0; i < o.layers.size(); ++i) {
    require(o.layers[i] >= 0, "quicknet_like: N entries must be non-negative");
    require(o.filters[i] > 0, "quicknet_like: k entries must be positive");
  }
  require(o.input_size >= 4 && o.input_channels > 0 && o.stem_filters > 0 && o.classes > 0,
          "quicknet_like: bad input size, stem or class count");

  Builder b(seed);
  TensorId x = b.input(1, o.input_size, o.input_size, o.input_channels);
  x = b.conv(x, o.input_channels, o.stem_filters, 3, 2, false, true, 0.0f, "stem_conv0");
  x = b.batch_norm(x, o.stem_filters, 0.0, 1.0, "stem_bn0");
  x = b.relu(x, "stem_relu0");
  x = b.conv(x, o.stem_filters, o.filters[0], 3, 2, false, true, 0.0f, "stem_conv1");
  x = b.batch_norm(x, o.filters[0], 0.0, 0.5, "stem_bn1");
  x = b.relu(x, "stem_relu1");

  int channels = o.filters[0];
  for (size_t s = 0; s < o.layers.size(); ++s) {
    const std::string sec = "s" + std::to_string(s);
    if (s > 0) {
      x = b.maxpool(x, 3, 2, sec + "_pool");
      x = b.conv(x, channels, o.filters[s], 1, 1, false, true, 0.0f, sec + "_transition");
      channels = o.filters[s];
      x = b.batch_norm(x, channels, 0.0, 1.0, sec + "_transition_bn");
    }
    const int n = 9 * channels;
    for (int l = 0; l < o.layers[s]; ++l) {
      const std::string name = sec + "_l" + std::to_string(l);
      TensorId y = b.sign(x, name + "_sign");
      y = b.conv(y, channels, channels, 3, 1, true, true, 1.0f, name + "_bconv");
      y = b.relu(y, name + "_relu");
      y = b.batch_norm(y, channels, relu_dot_mean(n), relu_dot_variance(n), name + "_bn");
      x = b.add(x, y, name + "_add");
    }
  }
  x = b.node(OpKind::kGlobalAvgPool, {x}, graph::NoAttrs{}, "pool");
  x = b.dense(x, channels, o.classes, "logits");
  return b.finish(x);
}

ShortcutVariant shortcut_variant_from_string(const std::string& name) {
  if (name == "A" || name == "a") return ShortcutVariant::kA;
  if (name == "B" || name == "b") return ShortcutVariant::kB;
  if (name == "C" || name == "c") return ShortcutVariant::kC;
  throw ConfigError("unknown shortcut variant '" + name + "' (expected A, B or C)");
}

Graph shortcut_study(ShortcutVariant variant, const ShortcutStudyOptions& o, uint64_t seed) {
  require(o.channels > 0 && o.spatial >= 2 && o.regular_blocks >= 0,
          "shortcut_study: bad channels, spatial size or block count");
  Builder b(seed);
  TensorId x = b.input(1, o.spatial, o.spatial, o.channels);
  const int n = 9 * o.channels;
  for (int l = 0; l < o.regular_blocks; ++l) {
    const std::string name = "block" + std::to_string(l);
    TensorId y = b.sign(x, name + "_sign");
    y = b.conv(y, o.channels, o.channels, 3, 1, true, true, 1.0f, name + "_bconv");
    y = b.batch_norm(y, o.channels, 0.0, dot_variance(n), name + "_bn");
    x = variant == ShortcutVariant::kC ? y : b.add(x, y, name + "_add");
  }
  const int wide = 2 * o.channels;
  TensorId y = b.sign(x, "down_sign");
  y = b.conv(y, o.channels, wide, 3, 2, true, true, 1.0f, "down_bconv");
  y = b.batch_norm(y, wide, 0.0, dot_variance(n), "down_bn");
  if (variant == ShortcutVariant::kA) {
    TensorId s = b.conv(x, o.channels, wide, 1, 2, false, true, 0.0f, "down_shortcut_conv");
    s = b.batch_norm(s, wide, 0.0, 1.0, "down_shortcut_bn");
    y = b.add(s, y, "down_add");
  }
  return b.finish(y);
}

std::string to_string(Precision p) { return p == Precision::kBinary ? "binary" : "float"; }

Precision precision_from_string(const std::string& name) {
  if (name == "binary") return Precision::kBinary;
  if (name == "float") return Precision::kFloat;
  throw ConfigError("unknown precision '" + name + "' (expected binary or float)");
}

Graph single_conv(const SingleConvOptions& o, uint64_t seed) {
  require(o.batch > 0 && o.height > 0 && o.width > 0 && o.in_channels > 0 &&
              o.out_channels > 0 && o.kernel > 0 && o.stride > 0,
          "single_conv: sizes must be positive");
  require(o.padding == "valid" || o.padding == "one" || o.padding == "zero",
          "single_conv: padding must be valid, one or zero");
  require(o.padding != "valid" || (o.height >= o.kernel && o.width >= o.kernel),
          "single_conv: input smaller than the kernel");
  const bool binary = o.precision == Precision::kBinary;
  Builder b(seed);
  TensorId x = b.input(o.batch, o.height, o.width, o.in_channels);
  if (o.maxpool_before) x = b.maxpool(x, 3, 1, "pool");
  if (binary) x = b.sign(x, "sign");
  x = b.conv(x, o.in_channels, o.out_channels, o.kernel, o.stride, binary,
             o.padding != "valid", o.padding == "one" ? 1.0f : 0.0f, "conv");
  const int n = o.kernel * o.kernel * o.in_channels;
  double mean = 0.0;
  double variance = binary ? dot_variance(n) : 1.0;
  if (o.relu) {
    x = b.relu(x, "relu");
    if (binary) {
      mean = relu_dot_mean(n);
      variance = relu_dot_variance(n);
    } else {
      mean = 1.0 / std::sqrt(2.0 * M_PI);
      variance = 0.5 - 1.0 / (2.0 * M_PI);
    }
  }
  if (o.batch_norm) x = b.batch_norm(x, o.out_channels, mean, variance, "bn");
  if (o.binary_output) x = b.sign(x, "out_sign");
  return b.finish(x);
}

}  // namespace binconv::bench
