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

#include "support/random_graphs.h"

#include <algorithm>
#include <cmath>

#include "binconv/bench/factory.h"
#include "binconv/graph/validate.h"
#include "binconv/runtime/oracle.h"

namespace binconv::testing {

using graph::DType;
using graph::Graph;
using graph::Node;
using graph::OpKind;
using graph::TensorId;

namespace {

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Graph random_quicknet(Rng& rng) {
  bench::QuickNetOptions o;
  const int sections = uniform_int(rng, 1, 3);
  const int widths[] = {8, 16, 32, 40, 64};
  o.layers.clear();
  o.filters.clear();
  for (int s = 0; s < sections; ++s) {
    o.layers.push_back(uniform_int(rng, 0, 2));
    o.filters.push_back(widths[uniform_int(rng, 0, 4)]);
  }
  o.input_size = 4 * uniform_int(rng, 3, 5);
  o.stem_filters = uniform_int(rng, 4, 16);
  o.classes = uniform_int(rng, 2, 12);
  return bench::quicknet_like(o, rng());
}

Graph random_shortcut(Rng& rng) {
  bench::ShortcutStudyOptions o;
  const int widths[] = {8, 16, 32, 48};
  o.channels = widths[uniform_int(rng, 0, 3)];
  o.spatial = uniform_int(rng, 4, 9);
  o.regular_blocks = uniform_int(rng, 0, 2);
  const auto v = static_cast<bench::ShortcutVariant>(uniform_int(rng, 0, 2));
  return bench::shortcut_study(v, o, rng());
}

Graph random_single_conv(Rng& rng) {
  bench::SingleConvOptions o;
  o.kernel = 1 + 2 * uniform_int(rng, 0, 2);
  o.stride = uniform_int(rng, 1, 2);
  const char* pads[] = {"valid", "one", "zero"};
  o.padding = pads[uniform_int(rng, 0, 2)];
  o.height = uniform_int(rng, o.kernel, 9);
  o.width = uniform_int(rng, o.kernel, 9);
  o.batch = uniform_int(rng, 1, 2);
  o.in_channels = uniform_int(rng, 1, 70);
  o.out_channels = uniform_int(rng, 1, 40);
  o.precision = chance(rng, 0.8) ? bench::Precision::kBinary : bench::Precision::kFloat;
  o.relu = chance(rng, 0.4);
  o.batch_norm = chance(rng, 0.7);
  o.binary_output = chance(rng, 0.5);
  o.maxpool_before = chance(rng, 0.3);
  return bench::single_conv(o, rng());
}

// Chain builder that tracks the NHWC shape of the current tensor.
class Chain {
 public:
  explicit Chain(Rng& rng) : rng_(rng) {}

  void start() {
    h_ = uniform_int(rng_, 3, 8);
    w_ = uniform_int(rng_, 3, 8);
    c_ = uniform_int(rng_, 1, 48);
    batch_ = uniform_int(rng_, 1, 2);
    x_ = g_.add_tensor(DType::kF32, {batch_, h_, w_, c_});
    g_.inputs.push_back(x_);
  }

  void step() {
    switch (uniform_int(rng_, 0, 6)) {
      case 0:
      case 1:
        binary_block(false);
        break;
      case 2:
        float_block();
        break;
      case 3:
        if (h_ >= 2 && w_ >= 2) pool();
        break;
      case 4:
        residual();
        break;
      case 5:
        relu(chance(rng_, 0.5) ? static_cast<float>(uniform(rng_, 0.5, 3.0)) : -1.0f);
        break;
      case 6:
        // Nothing to fold into when the producer is not a conv.
        if (signed_) {
          batch_norm(1.0);
          signed_ = false;
        }
        break;
    }
  }

  Graph finish() {
    if (chance(rng_, 0.4)) {
      x_ = op(OpKind::kGlobalAvgPool, {x_}, graph::NoAttrs{});
      h_ = w_ = 1;
      const int out = uniform_int(rng_, 1, 10);
      const TensorId wt = weights({out, c_}, 1.0 / std::sqrt(double(c_)));
      std::vector<TensorId> in = {x_, wt};
      if (chance(rng_, 0.5)) in.push_back(weights({out}, 0.1));
      x_ = op(OpKind::kDense, in, graph::NoAttrs{});
      c_ = out;
    }
    g_.outputs = {x_};
    graph::check_graph(g_);
    return std::move(g_);
  }

 private:
  TensorId op(OpKind kind, std::vector<TensorId> inputs, graph::Attrs attrs) {
    Node n;
    n.id = g_.unique_node_id(std::string(graph::to_string(kind)));
    n.op = kind;
    n.inputs = std::move(inputs);
    n.attrs = std::move(attrs);
    const TensorId out = g_.add_tensor(DType::kF32);
    n.outputs = {out};
    g_.nodes.push_back(std::move(n));
    return out;
  }

  TensorId weights(std::vector<int> shape, double scale, bool binary = false) {
    int64_t count = 1;
    for (int d : shape) count *= d;
    std::vector<float> v(count);
    std::normal_distribution<double> normal(0.0, scale);
    for (float& x : v) x = binary ? (chance(rng_, 0.5) ? 1.0f : -1.0f) : float(normal(rng_));
    const TensorId id = g_.add_tensor(DType::kF32, std::move(shape), std::move(v));
    g_.tensor(id).binary = binary;
    return id;
  }

  void batch_norm(double variance) {
    graph::BatchNormAttrs a;
    for (int k = 0; k < c_; ++k) {
      a.gamma.push_back(static_cast<float>(uniform(rng_, -1.5, 1.5)));
      a.beta.push_back(static_cast<float>(uniform(rng_, -0.5, 0.5)));
      a.mean.push_back(static_cast<float>(uniform(rng_, -0.3, 0.3) * std::sqrt(variance)));
      a.variance.push_back(static_cast<float>(variance * uniform(rng_, 0.5, 1.5)));
    }
    a.epsilon = chance(rng_, 0.2) ? 0.0f : 1e-3f;
    x_ = op(OpKind::kBatchNorm, {x_}, a);
  }

  void relu(float cap) {
    graph::ReluAttrs a;
    a.cap = cap;
    x_ = op(OpKind::kReLU, {x_}, a);
    signed_ = false;
  }

  // Geometry shared by the conv helpers; keeps the output at least 1x1.
  void conv(int k, int stride, bool same, float pad_value, int out_c, bool binary) {
    graph::Conv2DAttrs a;
    a.stride_h = a.stride_w = stride;
    a.same_padding = same;
    a.pad_value = pad_value;
    if (!binary && chance(rng_, 0.3)) {
      for (int o = 0; o < out_c; ++o) a.multiplier.push_back(uniform(rng_, 0.5, 1.5));
    }
    const TensorId wt = weights({out_c, k, k, c_}, 1.0 / std::sqrt(double(k * k * c_)), binary);
    std::vector<TensorId> in = {x_, wt};
    if (!binary && chance(rng_, 0.3)) in.push_back(weights({out_c}, 0.2));
    x_ = op(OpKind::kConv2D, in, a);
    if (same) {
      h_ = (h_ + stride - 1) / stride;
      w_ = (w_ + stride - 1) / stride;
    } else {
      h_ = (h_ - k) / stride + 1;
      w_ = (w_ - k) / stride + 1;
    }
    c_ = out_c;
  }

  int pick_kernel(bool same) {
    int k = 1 + 2 * uniform_int(rng_, 0, 2);
    while (!same && (k > h_ || k > w_)) k -= 2;
    return k;
  }

  void binary_block(bool keep_shape) {
    if (!signed_) x_ = op(OpKind::kSign, {x_}, graph::NoAttrs{});
    const int pad = keep_shape ? uniform_int(rng_, 1, 2) : uniform_int(rng_, 0, 2);
    const bool same = pad != 0;
    const int k = pick_kernel(same);
    const int stride = keep_shape ? 1 : uniform_int(rng_, 1, 2);
    const int out_c = keep_shape ? c_ : uniform_int(rng_, 1, 70);
    const int n = k * k * c_;
    conv(k, stride, same, pad == 1 ? 1.0f : 0.0f, out_c, true);
    signed_ = false;
    double variance = n;
    if (chance(rng_, 0.4)) {
      relu(chance(rng_, 0.2) ? static_cast<float>(uniform(rng_, 1.0, 8.0)) : -1.0f);
      variance = n * 0.35;
    }
    if (chance(rng_, 0.7)) batch_norm(variance);
    if (!keep_shape && chance(rng_, 0.4)) {
      x_ = op(OpKind::kSign, {x_}, graph::NoAttrs{});
      signed_ = true;
    }
  }

  void float_block() {
    const bool same = chance(rng_, 0.6);
    const int k = std::min(pick_kernel(same), 3);
    conv(k, uniform_int(rng_, 1, 2), same, chance(rng_, 0.5) ? 1.0f : 0.0f,
         uniform_int(rng_, 1, 32), false);
    signed_ = false;
    if (chance(rng_, 0.6)) batch_norm(1.0);
    if (chance(rng_, 0.4)) relu(-1.0f);
  }

  void pool() {
    graph::PoolAttrs a;
    const bool same = chance(rng_, 0.5);
    int size = uniform_int(rng_, 2, 3);
    if (!same) size = std::min({size, h_, w_});
    a.params.pool_h = a.params.pool_w = size;
    a.params.stride_h = a.params.stride_w = uniform_int(rng_, 1, 2);
    a.params.same_padding = same;
    x_ = op(OpKind::kMaxPool2D, {x_}, a);
    if (same) {
      h_ = (h_ + a.params.stride_h - 1) / a.params.stride_h;
      w_ = (w_ + a.params.stride_w - 1) / a.params.stride_w;
    } else {
      h_ = (h_ - size) / a.params.stride_h + 1;
      w_ = (w_ - size) / a.params.stride_w + 1;
    }
    // Still +-1 valued, but the conversion only binarizes a conv that reads a
    // Sign directly.
    signed_ = false;
  }

  void residual() {
    const TensorId skip = x_;
    binary_block(true);
    x_ = op(OpKind::kAdd, {skip, x_}, graph::NoAttrs{});
    signed_ = false;
  }

  Rng& rng_;
  Graph g_;
  TensorId x_ = 0;
  int batch_ = 1, h_ = 0, w_ = 0, c_ = 0;
  bool signed_ = false;  // x_ is a Sign output
};

}  // namespace

Graph random_factory_graph(Rng& rng) {
  switch (uniform_int(rng, 0, 2)) {
    case 0:
      return random_quicknet(rng);
    case 1:
      return random_shortcut(rng);
    default:
      return random_single_conv(rng);
  }
}

Graph random_training_graph(Rng& rng) {
  Chain chain(rng);
  chain.start();
  const int steps = uniform_int(rng, 1, 5);
  for (int i = 0; i < steps; ++i) chain.step();
  return chain.finish();
}

bool draw_inputs(const Graph& g, Rng& rng, double margin, int attempts,
                 std::vector<FloatTensor>* inputs) {
  for (int a = 0; a < attempts; ++a) {
    inputs->clear();
    for (TensorId id : g.inputs) inputs->push_back(random_normal(rng, g.tensor(id).nhwc()));
    runtime::OracleTrace trace;
    runtime::evaluate_oracle(g, *inputs, &trace);
    if (trace.min_sign_margin >= margin) return true;
  }
  return false;
}

Comparison compare(const std::vector<FloatTensor>& a, const std::vector<FloatTensor>& b) {
  Comparison c;
  if (a.size() != b.size()) {
    c.shapes_match = false;
    return c;
  }
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k].shape != b[k].shape) {
      c.shapes_match = false;
      return c;
    }
    for (size_t i = 0; i < a[k].data.size(); ++i) {
      const double e = std::abs(double{a[k].data[i]} - b[k].data[i]);
      c.max_abs_error = std::isnan(e) ? INFINITY : std::max(c.max_abs_error, e);
    }
  }
  return c;
}

}  // namespace binconv::testing
