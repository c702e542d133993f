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

#include "binconv/graph/validate.h"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "binconv/core/error.h"

namespace binconv::graph {

namespace {

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << "]";
  return os.str();
}

// Returns the node indices of one cycle among `pending` nodes.
std::vector<int> find_cycle(const Graph& g, const std::vector<int>& pending,
                            const std::map<TensorId, int>& producer) {
  std::set<int> alive(pending.begin(), pending.end());
  std::map<int, int> state;  // 1 = on stack, 2 = done
  std::vector<int> stack;
  std::vector<int> cycle;
  std::function<bool(int)> dfs = [&](int v) -> bool {
    state[v] = 1;
    stack.push_back(v);
    for (TensorId in : g.nodes[v].inputs) {
      auto it = producer.find(in);
      if (it == producer.end() || !alive.count(it->second)) continue;
      const int u = it->second;
      if (state[u] == 1) {
        auto pos = std::find(stack.begin(), stack.end(), u);
        cycle.assign(pos, stack.end());
        return true;
      }
      if (state[u] == 0 && dfs(u)) return true;
    }
    stack.pop_back();
    state[v] = 2;
    return false;
  };
  for (int v : pending) {
    if (state[v] == 0 && dfs(v)) break;
  }
  // The DFS walks producer edges, so reverse to get data-flow order.
  std::reverse(cycle.begin(), cycle.end());
  return cycle;
}

}  // namespace

void sort_topologically(Graph& g) {
  std::map<TensorId, int> producer;
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    for (TensorId out : g.nodes[i].outputs) {
      auto [it, inserted] = producer.emplace(out, static_cast<int>(i));
      if (!inserted) {
        throw GraphError(g.nodes[i].id, "tensor " + std::to_string(out) +
                                            " is also produced by node '" +
                                            g.nodes[it->second].id + "'");
      }
    }
  }
  const size_t count = g.nodes.size();
  std::vector<int> indegree(count, 0);
  std::vector<std::vector<int>> users(count);
  for (size_t i = 0; i < count; ++i) {
    std::set<int> deps;
    for (TensorId in : g.nodes[i].inputs) {
      auto it = producer.find(in);
      if (it != producer.end()) deps.insert(it->second);
    }
    indegree[i] = static_cast<int>(deps.size());
    for (int d : deps) users[d].push_back(static_cast<int>(i));
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (size_t i = 0; i < count; ++i) {
    if (indegree[i] == 0) ready.push(static_cast<int>(i));
  }
  std::vector<int> order;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int u : users[v]) {
      if (--indegree[u] == 0) ready.push(u);
    }
  }
  if (order.size() != count) {
    std::vector<int> pending;
    for (size_t i = 0; i < count; ++i) {
      if (indegree[i] > 0) pending.push_back(static_cast<int>(i));
    }
    const std::vector<int> cycle = find_cycle(g, pending, producer);
    std::string names;
    for (int v : cycle) names += g.nodes[v].id + " -> ";
    names += cycle.empty() ? "?" : g.nodes[cycle.front()].id;
    throw GraphError(cycle.empty() ? "" : g.nodes[cycle.front()].id,
                     "graph contains a cycle: " + names);
  }
  std::vector<Node> sorted;
  sorted.reserve(count);
  for (int v : order) sorted.push_back(std::move(g.nodes[v]));
  g.nodes = std::move(sorted);
}

namespace {

class Validator {
 public:
  explicit Validator(Graph& g) : g_(g) {}

  std::vector<Diagnostic> run() {
    check_graph_io();
    for (const Node& n : g_.nodes) {
      node_ = &n;
      check_node(n);
    }
    node_ = nullptr;
    for (TensorId id : g_.outputs) {
      if (!available_.count(id)) report("graph output " + std::to_string(id) + " is never produced");
    }
    return std::move(diags_);
  }

 private:
  void report(const std::string& message) {
    diags_.push_back({node_ ? node_->id : std::string(), message});
  }

  void check_graph_io() {
    for (TensorId id : g_.inputs) {
      const TensorDef& t = g_.tensor(id);
      if (t.is_constant()) report("graph input " + std::to_string(id) + " is a constant");
      if (t.dtype != DType::kF32) report("graph input " + std::to_string(id) + " must be f32");
      if (t.shape.size() != 4) {
        report("graph input " + std::to_string(id) + " needs a rank-4 NHWC shape");
      }
      available_.insert(id);
    }
    for (const auto& [id, t] : g_.tensors) {
      if (t.is_constant()) available_.insert(id);
      if (t.binary && t.dtype != DType::kF32) {
        report("tensor " + std::to_string(id) + " is flagged binary but is not f32");
      }
    }
  }

  // Input `i` of the current node as an activation of the given dtype.
  const TensorDef* activation(const Node& n, size_t i, DType dtype) {
    const TensorDef& t = g_.tensor(n.inputs[i]);
    if (t.is_constant()) {
      report("input " + std::to_string(i) + " must not be a constant");
      return nullptr;
    }
    if (t.dtype != dtype) {
      report("expected " + std::string(to_string(dtype)) + " input, got " +
             std::string(to_string(t.dtype)) + " (tensor " + std::to_string(t.id) + ")");
      return nullptr;
    }
    if (t.shape.size() != 4) {
      report("input tensor " + std::to_string(t.id) + " has no rank-4 shape");
      return nullptr;
    }
    return &t;
  }

  const TensorDef* constant(const Node& n, size_t i, std::initializer_list<DType> dtypes,
                            size_t rank, const char* what) {
    const TensorDef& t = g_.tensor(n.inputs[i]);
    if (!t.is_constant()) {
      report(std::string(what) + " (tensor " + std::to_string(t.id) + ") must be a constant");
      return nullptr;
    }
    if (std::find(dtypes.begin(), dtypes.end(), t.dtype) == dtypes.end()) {
      report(std::string(what) + " has unsupported dtype " + std::string(to_string(t.dtype)));
      return nullptr;
    }
    if (t.shape.size() != rank) {
      report(std::string(what) + " must have rank " + std::to_string(rank) + ", got " +
             shape_str(t.shape));
      return nullptr;
    }
    return &t;
  }

  bool arity(const Node& n, size_t min_in, size_t max_in) {
    if (n.inputs.size() < min_in || n.inputs.size() > max_in) {
      report("expects " + std::to_string(min_in) +
             (max_in != min_in ? "-" + std::to_string(max_in) : "") + " inputs, got " +
             std::to_string(n.inputs.size()));
      return false;
    }
    if (n.outputs.size() != 1) {
      report("expects exactly one output");
      return false;
    }
    return true;
  }

  template <typename T>
  bool per_channel(const std::vector<T>& v, int channels, const char* what,
                   bool allow_empty) {
    if (allow_empty && v.empty()) return true;
    if (static_cast<int>(v.size()) != channels) {
      report(std::string(what) + " has " + std::to_string(v.size()) +
             " entries, expected " + std::to_string(channels));
      return false;
    }
    return true;
  }

  void set_output(const Node& n, DType dtype, std::vector<int> shape) {
    TensorDef& out = g_.tensor(n.outputs[0]);
    if (out.is_constant()) {
      report("output tensor " + std::to_string(out.id) + " is a constant");
      return;
    }
    if (g_.is_input(out.id)) {
      report("output tensor " + std::to_string(out.id) + " is a graph input");
      return;
    }
    if (out.dtype != dtype) {
      report("output tensor " + std::to_string(out.id) + " declared " +
             std::string(to_string(out.dtype)) + ", op produces " +
             std::string(to_string(dtype)));
      return;
    }
    if (!out.shape.empty() && out.shape != shape) {
      report("output tensor " + std::to_string(out.id) + " declared shape " +
             shape_str(out.shape) + ", inferred " + shape_str(shape));
      return;
    }
    out.shape = std::move(shape);
    available_.insert(out.id);
  }

  void check_node(const Node& n) {
    if (n.attrs.index() != default_attrs(n.op).index()) {
      report("attribute record does not match op " + std::string(to_string(n.op)));
      return;
    }
    for (TensorId in : n.inputs) {
      if (!available_.count(in)) {
        report("input tensor " + std::to_string(in) +
               " is neither a graph input, a constant, nor produced earlier");
        return;
      }
    }
    try {
      check_op(n);
    } catch (const ConfigError& e) {
      report(e.what());
    }
  }

  void check_op(const Node& n) {
    switch (n.op) {
      case OpKind::kSign:
      case OpKind::kReLU:
      case OpKind::kQuantize:
      case OpKind::kDequantize: {
        if (!arity(n, 1, 1)) return;
        const DType in = n.op == OpKind::kDequantize ? DType::kBitpacked : DType::kF32;
        const DType out = n.op == OpKind::kQuantize ? DType::kBitpacked : DType::kF32;
        const TensorDef* x = activation(n, 0, in);
        if (x) set_output(n, out, x->shape);
        return;
      }
      case OpKind::kAdd: {
        if (!arity(n, 2, 2)) return;
        const TensorDef* a = activation(n, 0, DType::kF32);
        const TensorDef* b = activation(n, 1, DType::kF32);
        if (!a || !b) return;
        if (a->shape != b->shape) {
          report("Add of mismatched shapes " + shape_str(a->shape) + " and " +
                 shape_str(b->shape));
          return;
        }
        set_output(n, DType::kF32, a->shape);
        return;
      }
      case OpKind::kMaxPool2D:
      case OpKind::kBMaxPool2D: {
        if (!arity(n, 1, 1)) return;
        const DType dt = n.op == OpKind::kBMaxPool2D ? DType::kBitpacked : DType::kF32;
        const TensorDef* x = activation(n, 0, dt);
        if (!x) return;
        const auto& p = n.attr<PoolAttrs>().params;
        if (p.pool_h < 1 || p.pool_w < 1 || p.stride_h < 1 || p.stride_w < 1) {
          report("pool window and stride must be positive");
          return;
        }
        const auto geo = kernels::make_geometry(p, x->shape[1], x->shape[2]);
        set_output(n, dt, {x->shape[0], geo.out_h, geo.out_w, x->shape[3]});
        return;
      }
      case OpKind::kBatchNorm: {
        if (!arity(n, 1, 1)) return;
        const TensorDef* x = activation(n, 0, DType::kF32);
        if (!x) return;
        const auto& bn = n.attr<BatchNormAttrs>();
        const int c = x->shape[3];
        bool ok = per_channel(bn.gamma, c, "gamma", false) &
                  per_channel(bn.beta, c, "beta", false) &
                  per_channel(bn.mean, c, "mean", false) &
                  per_channel(bn.variance, c, "variance", false);
        if (!(bn.epsilon >= 0)) {
          report("epsilon must be non-negative");
          ok = false;
        }
        for (float v : bn.variance) {
          if (!(v >= 0) || !(v + bn.epsilon > 0)) {
            report("variance must be non-negative and variance + epsilon positive");
            ok = false;
            break;
          }
        }
        if (ok) set_output(n, DType::kF32, x->shape);
        return;
      }
      case OpKind::kGlobalAvgPool: {
        if (!arity(n, 1, 1)) return;
        const TensorDef* x = activation(n, 0, DType::kF32);
        if (x) set_output(n, DType::kF32, {x->shape[0], 1, 1, x->shape[3]});
        return;
      }
      case OpKind::kDense: {
        if (!arity(n, 2, 3)) return;
        const TensorDef* x = activation(n, 0, DType::kF32);
        const TensorDef* w = constant(n, 1, {DType::kF32}, 2, "dense weights");
        if (!x || !w) return;
        const int features = x->shape[1] * x->shape[2] * x->shape[3];
        if (w->shape[1] != features) {
          report("dense weights " + shape_str(w->shape) + " do not match " +
                 std::to_string(features) + " input features");
          return;
        }
        if (n.inputs.size() == 3) {
          const TensorDef* b = constant(n, 2, {DType::kF32}, 1, "dense bias");
          if (!b) return;
          if (b->shape[0] != w->shape[0]) {
            report("dense bias length does not match output features");
            return;
          }
        }
        set_output(n, DType::kF32, {x->shape[0], 1, 1, w->shape[0]});
        return;
      }
      case OpKind::kConv2D: {
        if (!arity(n, 2, 3)) return;
        const TensorDef* x = activation(n, 0, DType::kF32);
        const TensorDef* w = constant(n, 1, {DType::kF32}, 4, "conv weights");
        if (!x || !w) return;
        const auto& a = n.attr<Conv2DAttrs>();
        if (w->shape[3] != x->shape[3]) {
          report("conv weights expect " + std::to_string(w->shape[3]) +
                 " input channels, input has " + std::to_string(x->shape[3]));
          return;
        }
        if (a.stride_h < 1 || a.stride_w < 1) {
          report("stride must be positive");
          return;
        }
        if (a.pad_value != 0.0f && a.pad_value != 1.0f) {
          report("pad_value must be zero or one");
          return;
        }
        if (!per_channel(a.multiplier, w->shape[0], "multiplier", true) ||
            !per_channel(a.bias, w->shape[0], "bias", true)) {
          return;
        }
        if (n.inputs.size() == 3) {
          const TensorDef* b = constant(n, 2, {DType::kF32}, 1, "conv bias");
          if (!b) return;
          if (b->shape[0] != w->shape[0]) {
            report("conv bias length does not match output channels");
            return;
          }
        }
        const auto geo = kernels::make_geometry(x->shape[1], x->shape[2], w->shape[1],
                                                w->shape[2], a.stride_h, a.stride_w,
                                                a.same_padding);
        set_output(n, DType::kF32, {x->shape[0], geo.out_h, geo.out_w, w->shape[0]});
        return;
      }
      case OpKind::kBConv2D: {
        if (!arity(n, 2, 3)) return;
        const TensorDef* x = activation(n, 0, DType::kBitpacked);
        const TensorDef* w =
            constant(n, 1, {DType::kF32, DType::kBitpacked}, 4, "bconv weights");
        if (!x || !w) return;
        const auto& a = n.attr<BConv2DAttrs>();
        if (w->shape[3] != x->shape[3]) {
          report("bconv weights expect " + std::to_string(w->shape[3]) +
                 " input channels, input has " + std::to_string(x->shape[3]));
          return;
        }
        kernels::BConvDescriptor desc = make_bconv_descriptor(a, w->shape);
        desc.check();
        const auto geo = kernels::make_geometry(desc, x->shape[1], x->shape[2]);
        const bool corrected = a.padding == BConvPadding::kZeroCorrected;
        if (corrected != (n.inputs.size() == 3)) {
          report(corrected ? "zero_corrected padding requires a correction input"
                           : "only zero_corrected padding takes a correction input");
          return;
        }
        if (corrected) {
          const TensorDef* c = constant(n, 2, {DType::kI32}, 3, "padding correction");
          if (!c) return;
          const auto pc = kernels::position_classes(geo, desc.kernel_h, desc.kernel_w,
                                                    desc.stride_h, desc.stride_w);
          const std::vector<int> expect = {static_cast<int>(pc.row_cut.size()),
                                           static_cast<int>(pc.col_cut.size()),
                                           desc.out_channels};
          if (c->shape != expect) {
            report("padding correction shape " + shape_str(c->shape) +
                   " does not match geometry " + shape_str(expect));
            return;
          }
        }
        const DType out = a.output == kernels::OutputKind::kBitpacked ? DType::kBitpacked
                                                                      : DType::kF32;
        set_output(n, out, {x->shape[0], geo.out_h, geo.out_w, desc.out_channels});
        return;
      }
    }
  }

  Graph& g_;
  const Node* node_ = nullptr;
  std::set<TensorId> available_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate(Graph& g) {
  try {
    return Validator(g).run();
  } catch (const GraphError& e) {
    std::string message = e.what();
    const std::string prefix = "node '" + e.node() + "': ";
    if (!e.node().empty() && message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
    return {{e.node(), message}};
  }
}

void check_graph(Graph& g) {
  sort_topologically(g);
  const auto diags = validate(g);
  if (!diags.empty()) throw GraphError(diags.front().node, diags.front().message);
}

}  // namespace binconv::graph
