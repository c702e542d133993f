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

#include "binconv/converter/passes.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "binconv/core/bitpack.h"
#include "binconv/core/error.h"
#include "binconv/graph/validate.h"

namespace binconv::converter {

using graph::BConv2DAttrs;
using graph::BConvPadding;
using graph::DType;
using graph::Graph;
using graph::Node;
using graph::OpKind;
using graph::TensorDef;
using graph::TensorId;

namespace {

constexpr double kSnapTolerance = 1e-6;

// True when `id` feeds exactly the node at `consumer` (once) and nothing
// else, and is not a graph output.
bool sole_reader(const Graph& g, TensorId id, int consumer) {
  if (g.is_output(id)) return false;
  const auto readers = g.consumers(id);
  if (readers.size() != 1 || readers[0] != consumer) return false;
  const auto& in = g.nodes[consumer].inputs;
  return std::count(in.begin(), in.end(), id) == 1;
}

int sole_consumer(const Graph& g, TensorId id) {
  if (g.is_output(id)) return -1;
  const auto readers = g.consumers(id);
  return readers.size() == 1 ? readers[0] : -1;
}

void erase_nodes(Graph& g, const std::set<int>& doomed) {
  std::vector<Node> kept;
  kept.reserve(g.nodes.size());
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (!doomed.count(static_cast<int>(i))) kept.push_back(std::move(g.nodes[i]));
  }
  g.nodes = std::move(kept);
}

// Re-establishes the graph invariants after a rewrite.
void finish(Graph& g, const char* pass) {
  g.remove_unused_tensors();
  try {
    graph::check_graph(g);
  } catch (const GraphError& e) {
    throw ConversionError(pass, e.node(), std::string("rewrite left an invalid graph: ") +
                                              e.what());
  }
}

std::vector<double> ones(int n) { return std::vector<double>(n, 1.0); }

// Checks and snaps binary-flagged float weights to exact +-1.
void snap_binary_weights(Graph& g) {
  for (auto& [id, t] : g.tensors) {
    if (!t.binary || !t.is_constant()) continue;
    auto* values = std::get_if<std::vector<float>>(&t.data);
    if (!values) continue;
    for (float& v : *values) {
      if (std::abs(v - 1.0f) <= kSnapTolerance) {
        v = 1.0f;
      } else if (std::abs(v + 1.0f) <= kSnapTolerance) {
        v = -1.0f;
      } else {
        std::string node;
        for (const Node& n : g.nodes) {
          if (std::find(n.inputs.begin(), n.inputs.end(), id) != n.inputs.end()) {
            node = n.id;
            break;
          }
        }
        throw ConversionError("binarize", node,
                              "tensor " + std::to_string(id) +
                                  " is flagged binary but holds the value " +
                                  std::to_string(v));
      }
    }
  }
}

BitpackedTensor pack_weight_tensor(const TensorDef& w) {
  const Shape shape{w.shape[0], w.shape[1], w.shape[2], w.shape[3]};
  if (w.dtype == DType::kBitpacked) {
    BitpackedTensor t(shape);
    t.words = w.words();
    return t;
  }
  return quantize(FloatTensor(shape, w.floats()));
}

}  // namespace

PassReport pass_binarize(Graph& g) {
  PassReport r;
  r.pass = "binarize";
  snap_binary_weights(g);
  std::vector<Node> added;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].op != OpKind::kSign) continue;
    const TensorId y = g.nodes[i].outputs[0];
    const TensorId q = g.add_tensor(DType::kBitpacked);
    Node& sign = g.nodes[i];
    sign.op = OpKind::kQuantize;
    sign.attrs = graph::NoAttrs{};
    sign.outputs = {q};
    ++r.nodes_modified;

    bool float_readers = g.is_output(y);
    for (int c : g.consumers(y)) {
      Node& n = g.nodes[c];
      const bool binary_conv = n.op == OpKind::kConv2D && n.inputs[0] == y &&
                               std::count(n.inputs.begin(), n.inputs.end(), y) == 1 &&
                               g.tensor(n.inputs[1]).binary;
      if (!binary_conv) {
        float_readers = true;
        continue;
      }
      const auto& conv = n.attr<graph::Conv2DAttrs>();
      const int out_c = g.tensor(n.inputs[1]).shape[0];
      BConv2DAttrs b;
      b.stride_h = conv.stride_h;
      b.stride_w = conv.stride_w;
      b.padding = !conv.same_padding        ? BConvPadding::kValid
                  : conv.pad_value == 1.0f ? BConvPadding::kOne
                                           : BConvPadding::kZero;
      b.multiplier = conv.multiplier.empty() ? ones(out_c) : conv.multiplier;
      b.bias = conv.bias.empty() ? std::vector<double>(out_c, 0.0) : conv.bias;
      if (n.inputs.size() == 3) {
        const auto& extra = g.tensor(n.inputs[2]).floats();
        for (int k = 0; k < out_c; ++k) b.bias[k] += extra[k];
      }
      n.op = OpKind::kBConv2D;
      n.attrs = b;
      n.inputs = {q, n.inputs[1]};
      ++r.nodes_modified;
    }
    if (float_readers) {
      Node deq;
      deq.id = g.unique_node_id(sign.id + "_dequantize");
      deq.op = OpKind::kDequantize;
      deq.inputs = {q};
      deq.outputs = {y};
      added.push_back(std::move(deq));
      ++r.nodes_added;
    }
  }
  for (Node& n : added) g.nodes.push_back(std::move(n));
  finish(g, "binarize");
  return r;
}

namespace {

// out' = s * (out - mean) + beta with s = gamma / sqrt(var + eps), written
// back as a new per-channel multiplier and bias.
void fold_affine(const graph::BatchNormAttrs& bn, std::vector<double>& multiplier,
                 std::vector<double>& bias) {
  for (size_t k = 0; k < multiplier.size(); ++k) {
    const double s = bn.gamma[k] / std::sqrt(double{bn.variance[k]} + bn.epsilon);
    multiplier[k] *= s;
    bias[k] = s * (bias[k] - bn.mean[k]) + bn.beta[k];
  }
}

bool float_bconv(const Node& n) {
  return n.op == OpKind::kBConv2D &&
         n.attr<BConv2DAttrs>().output == kernels::OutputKind::kFloat;
}

// Moves a ReLU into the BConv2D that feeds it. Valid when the affine is a
// positive scale without offset, so act(m * dot) = m * act'(dot).
bool absorb_relu(BConv2DAttrs& b, float cap, std::string* why) {
  if (b.activation.kind != kernels::ActivationKind::kNone) {
    *why = "conv already has a fused activation";
    return false;
  }
  for (size_t k = 0; k < b.multiplier.size(); ++k) {
    if (b.bias[k] != 0.0 || !(b.multiplier[k] > 0.0)) {
      *why = "relu does not commute with the existing multiplier/bias";
      return false;
    }
    if (cap >= 0 && b.multiplier[k] != 1.0) {
      *why = "capped relu needs a unit multiplier";
      return false;
    }
  }
  b.activation.kind =
      cap >= 0 ? kernels::ActivationKind::kClampedRelu : kernels::ActivationKind::kRelu;
  b.activation.cap = cap >= 0 ? cap : 0.0f;
  return true;
}

}  // namespace

PassReport pass_fold_batchnorm(Graph& g) {
  PassReport r;
  r.pass = "fold_batchnorm";
  std::set<int> doomed;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].op != OpKind::kBatchNorm) continue;
    const Node& bn = g.nodes[i];
    const auto& bn_attrs = bn.attr<graph::BatchNormAttrs>();
    const TensorId t = bn.inputs[0];
    const int p = g.producer(t);
    if (p < 0 || doomed.count(p) || !sole_reader(g, t, static_cast<int>(i))) {
      r.skipped.push_back(bn.id + ": input is not a single-use conv output");
      continue;
    }
    int conv = p;
    int relu = -1;
    if (g.nodes[p].op == OpKind::kReLU) {
      const TensorId u = g.nodes[p].inputs[0];
      const int q = g.producer(u);
      if (q < 0 || !float_bconv(g.nodes[q]) || !sole_reader(g, u, p)) {
        r.skipped.push_back(bn.id + ": relu is not fed by a float binary conv");
        continue;
      }
      conv = q;
      relu = p;
    }
    Node& c = g.nodes[conv];
    if (c.op == OpKind::kConv2D) {
      auto& a = c.attr<graph::Conv2DAttrs>();
      const int out_c = g.tensor(c.inputs[1]).shape[0];
      if (a.multiplier.empty()) a.multiplier = ones(out_c);
      if (a.bias.empty()) a.bias.assign(out_c, 0.0);
      if (c.inputs.size() == 3) {
        const auto& extra = g.tensor(c.inputs[2]).floats();
        for (int k = 0; k < out_c; ++k) a.bias[k] += extra[k];
        c.inputs.pop_back();
      }
      fold_affine(bn_attrs, a.multiplier, a.bias);
    } else if (float_bconv(c)) {
      auto& a = c.attr<BConv2DAttrs>();
      if (relu >= 0) {
        BConv2DAttrs trial = a;
        std::string why;
        if (!absorb_relu(trial, g.nodes[relu].attr<graph::ReluAttrs>().cap, &why)) {
          r.skipped.push_back(bn.id + ": " + why);
          continue;
        }
        a = trial;
        doomed.insert(relu);
        ++r.nodes_removed;
      }
      fold_affine(bn_attrs, a.multiplier, a.bias);
    } else {
      r.skipped.push_back(bn.id + ": follows " + std::string(to_string(c.op)));
      continue;
    }
    c.outputs = {bn.outputs[0]};
    doomed.insert(static_cast<int>(i));
    ++r.nodes_removed;
    ++r.nodes_modified;
  }
  erase_nodes(g, doomed);
  finish(g, "fold_batchnorm");
  return r;
}

PassReport pass_reorder_maxpool(Graph& g) {
  PassReport r;
  r.pass = "reorder_maxpool";
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].op != OpKind::kMaxPool2D) continue;
    const TensorId t = g.nodes[i].outputs[0];
    const int q = sole_consumer(g, t);
    if (q < 0 || g.nodes[q].op != OpKind::kQuantize) {
      r.skipped.push_back(g.nodes[i].id + ": output is needed in float");
      continue;
    }
    Node& pool = g.nodes[i];
    Node& quant = g.nodes[q];
    const TensorId packed = g.add_tensor(DType::kBitpacked);
    const graph::Attrs pool_attrs = pool.attrs;
    const TensorId x = pool.inputs[0];
    const TensorId out = quant.outputs[0];
    // The pool node becomes the Quantize and vice versa; ids follow the op.
    std::swap(pool.id, quant.id);
    pool.op = OpKind::kQuantize;
    pool.attrs = graph::NoAttrs{};
    pool.inputs = {x};
    pool.outputs = {packed};
    quant.op = OpKind::kBMaxPool2D;
    quant.attrs = pool_attrs;
    quant.inputs = {packed};
    quant.outputs = {out};
    r.nodes_modified += 2;
  }
  finish(g, "reorder_maxpool");
  return r;
}

PassReport pass_fuse_binary_chain(Graph& g) {
  PassReport r;
  r.pass = "fuse_binary_chain";
  std::set<int> doomed;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    Node& b = g.nodes[i];
    if (!float_bconv(b)) continue;
    const TensorId t = b.outputs[0];
    const int q = sole_consumer(g, t);
    if (q < 0 || g.nodes[q].op != OpKind::kQuantize) continue;
    auto& a = b.attr<BConv2DAttrs>();
    kernels::BConvDescriptor desc =
        graph::make_bconv_descriptor(a, g.tensor(b.inputs[1]).shape);
    const kernels::ThresholdFit fit = kernels::compute_thresholds(desc);
    if (!fit.non_monotone.empty()) {
      r.skipped.push_back(b.id + ": channel " + std::to_string(fit.non_monotone.front()) +
                          " is not monotone in the accumulator");
      continue;
    }
    a.output = kernels::OutputKind::kBitpacked;
    a.thresholds = fit.set;
    b.outputs = {g.nodes[q].outputs[0]};
    doomed.insert(q);
    ++r.nodes_modified;
    ++r.nodes_removed;
  }
  erase_nodes(g, doomed);
  finish(g, "fuse_binary_chain");
  return r;
}

PassReport pass_legalize_padding(Graph& g) {
  PassReport r;
  r.pass = "legalize_padding";
  for (Node& n : g.nodes) {
    if (n.op != OpKind::kBConv2D) continue;
    auto& a = n.attr<BConv2DAttrs>();
    if (a.padding != BConvPadding::kZero) continue;
    const TensorDef& w = g.tensor(n.inputs[1]);
    const TensorDef& x = g.tensor(n.inputs[0]);
    const kernels::BConvDescriptor desc = graph::make_bconv_descriptor(a, w.shape);
    const kernels::PaddingCorrection corr = kernels::build_padding_correction(
        pack_weight_tensor(w), desc, x.shape[1], x.shape[2]);
    const TensorId id = g.add_tensor(
        DType::kI32, {corr.num_row_classes, corr.num_col_classes, corr.out_channels},
        corr.values);
    a.padding = BConvPadding::kZeroCorrected;
    n.inputs.push_back(id);
    ++r.nodes_modified;
  }
  finish(g, "legalize_padding");
  return r;
}

PassReport pass_pack_weights(Graph& g) {
  PassReport r;
  r.pass = "pack_weights";
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    Node& n = g.nodes[i];
    if (n.op != OpKind::kBConv2D) continue;
    const TensorId wid = n.inputs[1];
    if (g.tensor(wid).dtype == DType::kBitpacked) continue;
    const BitpackedTensor packed = pack_weight_tensor(g.tensor(wid));
    bool shared = false;
    for (int c : g.consumers(wid)) {
      const Node& other = g.nodes[c];
      if (other.op != OpKind::kBConv2D || other.inputs[0] == wid) shared = true;
    }
    if (shared) {
      n.inputs[1] = g.add_tensor(DType::kBitpacked, g.tensor(wid).shape, packed.words);
    } else {
      TensorDef& w = g.tensor(wid);
      w.dtype = DType::kBitpacked;
      w.binary = false;
      w.data = packed.words;
    }
    ++r.nodes_modified;
  }
  finish(g, "pack_weights");
  return r;
}

const std::vector<Pass>& pipeline() {
  static const std::vector<Pass> passes = {
      {"binarize", pass_binarize},
      {"fold_batchnorm", pass_fold_batchnorm},
      {"reorder_maxpool", pass_reorder_maxpool},
      {"fuse_binary_chain", pass_fuse_binary_chain},
      {"legalize_padding", pass_legalize_padding},
      {"pack_weights", pass_pack_weights},
  };
  return passes;
}

}  // namespace binconv::converter
