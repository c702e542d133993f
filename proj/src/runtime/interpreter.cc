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

#include "binconv/runtime/interpreter.h"

#include <chrono>
#include <cstring>
#include <variant>

#include "binconv/converter/model_format.h"
#include "binconv/core/bitpack.h"
#include "binconv/core/error.h"
#include "binconv/graph/validate.h"
#include "binconv/kernels/bconv.h"
#include "binconv/kernels/float_ops.h"
#include "binconv/kernels/parallel.h"

namespace binconv::runtime {

using graph::DType;
using graph::Graph;
using graph::Node;
using graph::OpKind;
using graph::TensorDef;
using graph::TensorId;

namespace {

using Clock = std::chrono::steady_clock;

double micros(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::micro>(b - a).count();
}

struct Block {
  alignas(kArenaAlignment) std::byte bytes[kArenaAlignment];
};

struct BConvOp {
  kernels::BConvDescriptor desc;
  kernels::ConvGeometry geom;
  kernels::BitpackedMatrix weights;
  kernels::PaddingCorrection correction;
  kernels::DoubledThresholds thresholds;
  int rows = 0;
};

struct FloatConvOp {
  kernels::FloatConvPlan plan;
};

struct DenseOp {
  std::vector<float> weights_io;
  std::vector<float> bias;
  int in_features = 0;
  int out_features = 0;
};

struct PoolOp {
  kernels::PoolParams params;
};

struct BatchNormOp {
  kernels::BatchNormParams params;
};

struct ReluOp {
  float cap = -1.0f;
};

struct NoOp {};

using Prepared = std::variant<NoOp, BConvOp, FloatConvOp, DenseOp, PoolOp, BatchNormOp, ReluOp>;

struct Step {
  OpKind op;
  std::vector<int> inputs;  // buffer indices, constants skipped
  int output = -1;
  Shape in_shape;
  Shape out_shape;
  Prepared prepared;
};

}  // namespace

struct ExecutionPlan::Impl {
  Graph g;
  std::vector<Step> steps;
  std::vector<OpInfo> info;
  std::map<TensorId, int> buffer_index;
  std::vector<Shape> buffer_shape;
  std::vector<DType> buffer_dtype;
  MemoryPlan memory;
  int64_t unshared = 0;
  size_t im2col_words = 0;
  size_t acc_values = 0;
  size_t conv_scratch = 0;

  void prepare();
  void run(const std::vector<FloatTensor>& inputs, int threads, std::vector<OpTiming>* timings,
           std::vector<FloatTensor>& outputs) const;
};

namespace {

int64_t activation_bytes(DType dtype, const Shape& s) {
  if (dtype == DType::kBitpacked) return s.pixels() * packed_words(s.channels) * 4;
  return s.elements() * 4;
}

kernels::PaddingCorrection correction_from_tensor(const TensorDef& t,
                                                  const kernels::BConvDescriptor& d,
                                                  const kernels::ConvGeometry& geom) {
  const auto classes =
      kernels::position_classes(geom, d.kernel_h, d.kernel_w, d.stride_h, d.stride_w);
  kernels::PaddingCorrection c;
  c.row_class = classes.row_class;
  c.col_class = classes.col_class;
  c.num_row_classes = t.shape[0];
  c.num_col_classes = t.shape[1];
  c.out_channels = t.shape[2];
  c.values = t.ints();
  return c;
}

}  // namespace

void ExecutionPlan::Impl::prepare() {
  // Buffers: every non-constant tensor, in id order.
  std::vector<BufferRequest> requests;
  for (const auto& [id, t] : g.tensors) {
    if (t.is_constant()) continue;
    buffer_index[id] = static_cast<int>(requests.size());
    buffer_shape.push_back(t.nhwc());
    buffer_dtype.push_back(t.dtype);
    BufferRequest r;
    r.bytes = activation_bytes(t.dtype, t.nhwc());
    r.first = g.is_input(id) ? 0 : -1;
    r.last = -1;
    requests.push_back(r);
  }
  const int last_step = static_cast<int>(g.nodes.size());
  for (size_t i = 0; i < g.nodes.size(); ++i) {
    const Node& n = g.nodes[i];
    for (TensorId in : n.inputs) {
      auto it = buffer_index.find(in);
      if (it != buffer_index.end()) requests[it->second].last = static_cast<int>(i);
    }
    for (TensorId out : n.outputs) {
      BufferRequest& r = requests[buffer_index.at(out)];
      r.first = static_cast<int>(i);
      r.last = std::max(r.last, static_cast<int>(i));
    }
  }
  for (TensorId id : g.outputs) requests[buffer_index.at(id)].last = last_step;
  for (BufferRequest& r : requests) {
    if (r.first < 0) r.first = 0;
    if (r.last < r.first) r.last = r.first;
  }
  memory = plan_memory(requests);
  unshared = runtime::unshared_bytes(requests);

  for (const Node& n : g.nodes) {
    if (n.op == OpKind::kSign) {
      throw GraphError(n.id, "Sign must be converted to Quantize before execution");
    }
    Step s;
    s.op = n.op;
    OpInfo info_entry;
    info_entry.id = n.id;
    info_entry.op = n.op;
    for (TensorId in : n.inputs) {
      auto it = buffer_index.find(in);
      if (it == buffer_index.end()) continue;
      s.inputs.push_back(it->second);
      info_entry.bytes_read += activation_bytes(buffer_dtype[it->second], buffer_shape[it->second]);
    }
    s.output = buffer_index.at(n.outputs[0]);
    s.in_shape = g.tensor(n.inputs[0]).nhwc();
    s.out_shape = buffer_shape[s.output];
    info_entry.bytes_written = activation_bytes(buffer_dtype[s.output], s.out_shape);
    switch (n.op) {
      case OpKind::kBConv2D: {
        const auto& a = n.attr<graph::BConv2DAttrs>();
        const TensorDef& w = g.tensor(n.inputs[1]);
        if (w.dtype != DType::kBitpacked) {
          throw GraphError(n.id, "runtime needs bitpacked bconv weights");
        }
        if (a.padding == graph::BConvPadding::kZero) {
          throw GraphError(n.id, "zero padding must be legalized before execution");
        }
        BConvOp op;
        op.desc = graph::make_bconv_descriptor(a, w.shape);
        op.desc.check();
        op.geom = kernels::make_geometry(op.desc, s.in_shape.height, s.in_shape.width);
        BitpackedTensor wt(Shape{w.shape[0], w.shape[1], w.shape[2], w.shape[3]});
        wt.words = w.words();
        op.weights = kernels::weight_matrix(wt);
        if (a.padding == graph::BConvPadding::kZeroCorrected) {
          op.correction = correction_from_tensor(g.tensor(n.inputs[2]), op.desc, op.geom);
        }
        if (a.output == kernels::OutputKind::kBitpacked) {
          op.thresholds = kernels::doubled_thresholds(a.thresholds);
        }
        op.rows = static_cast<int>(s.out_shape.pixels());
        im2col_words = std::max(im2col_words,
                                static_cast<size_t>(op.rows) * op.desc.words_per_row());
        acc_values = std::max(acc_values, static_cast<size_t>(op.rows) * op.desc.out_channels);
        info_entry.macs_binary = s.out_shape.elements() * op.desc.dot_length();
        s.prepared = std::move(op);
        break;
      }
      case OpKind::kConv2D: {
        const auto& a = n.attr<graph::Conv2DAttrs>();
        const TensorDef& w = g.tensor(n.inputs[1]);
        const int out_c = w.shape[0];
        std::vector<float> mult(a.multiplier.begin(), a.multiplier.end());
        std::vector<float> bias;
        if (!a.bias.empty() || n.inputs.size() == 3) {
          std::vector<double> sum(out_c, 0.0);
          if (!a.bias.empty()) sum = a.bias;
          if (n.inputs.size() == 3) {
            const auto& extra = g.tensor(n.inputs[2]).floats();
            for (int k = 0; k < out_c; ++k) sum[k] += extra[k];
          }
          bias.assign(sum.begin(), sum.end());
        }
        FloatConvOp op;
        op.plan = kernels::prepare_conv2d(
            FloatTensor(Shape{w.shape[0], w.shape[1], w.shape[2], w.shape[3]}, w.floats()),
            graph::make_conv_params(a), s.in_shape.height, s.in_shape.width, std::move(mult),
            std::move(bias));
        conv_scratch = std::max(conv_scratch, op.plan.scratch_floats(s.in_shape.batch));
        info_entry.macs_float =
            s.out_shape.elements() * int64_t{w.shape[1]} * w.shape[2] * w.shape[3];
        s.prepared = std::move(op);
        break;
      }
      case OpKind::kDense: {
        const TensorDef& w = g.tensor(n.inputs[1]);
        DenseOp op;
        op.out_features = w.shape[0];
        op.in_features = w.shape[1];
        const auto& wf = w.floats();
        op.weights_io.resize(wf.size());
        for (int o = 0; o < op.out_features; ++o) {
          for (int i = 0; i < op.in_features; ++i) {
            op.weights_io[static_cast<size_t>(i) * op.out_features + o] =
                wf[static_cast<size_t>(o) * op.in_features + i];
          }
        }
        if (n.inputs.size() == 3) op.bias = g.tensor(n.inputs[2]).floats();
        info_entry.macs_float = int64_t{s.in_shape.batch} * op.in_features * op.out_features;
        s.prepared = std::move(op);
        break;
      }
      case OpKind::kMaxPool2D:
      case OpKind::kBMaxPool2D:
        s.prepared = PoolOp{n.attr<graph::PoolAttrs>().params};
        break;
      case OpKind::kBatchNorm:
        s.prepared = BatchNormOp{graph::make_batch_norm_params(n.attr<graph::BatchNormAttrs>())};
        break;
      case OpKind::kReLU:
        s.prepared = ReluOp{n.attr<graph::ReluAttrs>().cap};
        break;
      default:
        break;
    }
    steps.push_back(std::move(s));
    info.push_back(std::move(info_entry));
  }
}

void ExecutionPlan::Impl::run(const std::vector<FloatTensor>& inputs, int threads,
                              std::vector<OpTiming>* timings,
                              std::vector<FloatTensor>& outputs) const {
  if (inputs.size() != g.inputs.size()) {
    throw ConfigError("model takes " + std::to_string(g.inputs.size()) + " inputs, got " +
                      std::to_string(inputs.size()));
  }
  std::vector<Block> arena((memory.arena_bytes + kArenaAlignment - 1) / kArenaAlignment);
  std::byte* base = arena.empty() ? nullptr : arena.front().bytes;
  auto fptr = [&](int b) { return reinterpret_cast<float*>(base + memory.buffers[b].offset); };
  auto wptr = [&](int b) { return reinterpret_cast<uint32_t*>(base + memory.buffers[b].offset); };

  for (size_t i = 0; i < inputs.size(); ++i) {
    const int b = buffer_index.at(g.inputs[i]);
    if (inputs[i].shape != buffer_shape[b]) {
      throw ConfigError("input " + std::to_string(i) + " has shape " + inputs[i].shape.str() +
                        ", model expects " + buffer_shape[b].str());
    }
    std::memcpy(fptr(b), inputs[i].data.data(), inputs[i].data.size() * sizeof(float));
  }

  std::vector<uint32_t> cols(im2col_words);
  std::vector<int32_t> acc(acc_values);
  std::vector<float> scratch(conv_scratch);
  if (timings) timings->assign(steps.size(), OpTiming{});

  for (size_t k = 0; k < steps.size(); ++k) {
    const Step& s = steps[k];
    const auto start = Clock::now();
    const int in0 = s.inputs.empty() ? -1 : s.inputs[0];
    switch (s.op) {
      case OpKind::kSign:
        break;  // rejected when the plan is built
      case OpKind::kQuantize:
        quantize({fptr(in0), static_cast<size_t>(s.in_shape.elements())}, s.in_shape.pixels(),
                 s.in_shape.channels,
                 {wptr(s.output), static_cast<size_t>(s.out_shape.pixels() *
                                                      packed_words(s.out_shape.channels))});
        break;
      case OpKind::kDequantize:
        dequantize({wptr(in0), static_cast<size_t>(s.in_shape.pixels() *
                                                   packed_words(s.in_shape.channels))},
                   s.in_shape.pixels(), s.in_shape.channels,
                   {fptr(s.output), static_cast<size_t>(s.out_shape.elements())});
        break;
      case OpKind::kBConv2D: {
        const BConvOp& op = std::get<BConvOp>(s.prepared);
        const auto& d = op.desc;
        kernels::im2col_bitpacked(
            {wptr(in0), static_cast<size_t>(s.in_shape.pixels() * d.words_per_tap())},
            s.in_shape, op.geom, d.kernel_h, d.kernel_w, d.stride_h, d.stride_w,
            {cols.data(), static_cast<size_t>(op.rows) * d.words_per_row()});
        kernels::bgemm(cols.data(), op.rows, op.weights.data.data(), d.out_channels,
                       d.words_per_row(), acc.data(), threads);
        const auto mid = Clock::now();
        const kernels::PaddingCorrection* corr = op.correction.empty() ? nullptr : &op.correction;
        if (d.output_kind == kernels::OutputKind::kBitpacked) {
          uint32_t* out = wptr(s.output);
          kernels::parallel_for(0, op.rows, threads, [&](int64_t lo, int64_t hi) {
            kernels::output_transform_bitpacked(acc.data(), static_cast<int>(lo),
                                                static_cast<int>(hi), d.out_channels,
                                                op.thresholds, op.geom.out_h, op.geom.out_w,
                                                corr, out);
          });
        } else {
          float* out = fptr(s.output);
          kernels::parallel_for(0, op.rows, threads, [&](int64_t lo, int64_t hi) {
            kernels::output_transform_float(acc.data(), static_cast<int>(lo),
                                            static_cast<int>(hi), d, op.geom.out_h,
                                            op.geom.out_w, corr, out);
          });
        }
        if (timings) {
          const auto end = Clock::now();
          (*timings)[k].accumulate_us = micros(start, mid);
          (*timings)[k].transform_us = micros(mid, end);
        }
        break;
      }
      case OpKind::kConv2D:
        kernels::conv2d(std::get<FloatConvOp>(s.prepared).plan, fptr(in0), s.in_shape.batch,
                        scratch.data(), fptr(s.output), threads);
        break;
      case OpKind::kMaxPool2D:
        kernels::maxpool(fptr(in0), s.in_shape, std::get<PoolOp>(s.prepared).params,
                         fptr(s.output));
        break;
      case OpKind::kBMaxPool2D:
        kernels::bmaxpool(wptr(in0), s.in_shape, std::get<PoolOp>(s.prepared).params,
                          wptr(s.output));
        break;
      case OpKind::kBatchNorm:
        kernels::batch_norm(fptr(in0), s.in_shape.pixels(),
                            std::get<BatchNormOp>(s.prepared).params, fptr(s.output));
        break;
      case OpKind::kReLU: {
        const size_t count = static_cast<size_t>(s.out_shape.elements());
        kernels::relu({fptr(in0), count}, std::get<ReluOp>(s.prepared).cap,
                      {fptr(s.output), count});
        break;
      }
      case OpKind::kAdd: {
        const size_t count = static_cast<size_t>(s.out_shape.elements());
        kernels::add({fptr(s.inputs[0]), count}, {fptr(s.inputs[1]), count},
                     {fptr(s.output), count});
        break;
      }
      case OpKind::kDense: {
        const DenseOp& op = std::get<DenseOp>(s.prepared);
        kernels::dense(fptr(in0), s.in_shape.batch, op.in_features, op.weights_io.data(),
                       op.bias, op.out_features, fptr(s.output), threads);
        break;
      }
      case OpKind::kGlobalAvgPool:
        kernels::global_avg_pool(fptr(in0), s.in_shape, fptr(s.output));
        break;
    }
    if (timings) (*timings)[k].total_us = micros(start, Clock::now());
  }

  outputs.clear();
  for (TensorId id : g.outputs) {
    const int b = buffer_index.at(id);
    const Shape& shape = buffer_shape[b];
    FloatTensor t(shape);
    if (buffer_dtype[b] == DType::kBitpacked) {
      dequantize({wptr(b), static_cast<size_t>(shape.pixels() * packed_words(shape.channels))},
                 shape.pixels(), shape.channels, t.data);
    } else {
      std::memcpy(t.data.data(), fptr(b), t.data.size() * sizeof(float));
    }
    outputs.push_back(std::move(t));
  }
}

ExecutionPlan::ExecutionPlan(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
ExecutionPlan::ExecutionPlan(ExecutionPlan&&) noexcept = default;
ExecutionPlan& ExecutionPlan::operator=(ExecutionPlan&&) noexcept = default;
ExecutionPlan::~ExecutionPlan() = default;

ExecutionPlan ExecutionPlan::build(Graph g) {
  graph::check_graph(g);
  for (const auto& [id, t] : g.tensors) {
    if (!t.is_constant() && t.dtype == DType::kI32) {
      throw GraphError("", "tensor " + std::to_string(id) + ": i32 activations are not supported");
    }
  }
  auto impl = std::make_unique<Impl>();
  impl->g = std::move(g);
  impl->prepare();
  return ExecutionPlan(std::move(impl));
}

const Graph& ExecutionPlan::graph() const { return impl_->g; }
const MemoryPlan& ExecutionPlan::memory() const { return impl_->memory; }
int ExecutionPlan::buffer_of(TensorId id) const {
  auto it = impl_->buffer_index.find(id);
  return it == impl_->buffer_index.end() ? -1 : it->second;
}
int64_t ExecutionPlan::arena_bytes() const { return impl_->memory.arena_bytes; }
int64_t ExecutionPlan::unshared_bytes() const { return impl_->unshared; }
const std::vector<OpInfo>& ExecutionPlan::ops() const { return impl_->info; }

std::vector<FloatTensor> ExecutionPlan::execute(const std::vector<FloatTensor>& inputs,
                                                int threads,
                                                std::vector<OpTiming>* timings) const {
  std::vector<FloatTensor> outputs;
  impl_->run(inputs, std::max(threads, 1), timings, outputs);
  return outputs;
}

ExecutionPlan load_model(std::span<const uint8_t> bytes) {
  return ExecutionPlan::build(converter::read_model(bytes));
}

}  // namespace binconv::runtime
