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

#include "binconv/runtime/oracle.h"

#include <algorithm>
#include <cmath>

#include "binconv/core/error.h"

namespace binconv::runtime {

using graph::BConvPadding;
using graph::DType;
using graph::Graph;
using graph::Node;
using graph::OpKind;
using graph::TensorDef;
using graph::TensorId;

namespace {

class Oracle {
 public:
  Oracle(const Graph& g, OracleTrace* trace) : g_(g), trace_(trace) {}

  std::map<TensorId, OracleValue> run(const std::vector<FloatTensor>& inputs) {
    if (inputs.size() != g_.inputs.size()) {
      throw ConfigError("oracle: graph takes " + std::to_string(g_.inputs.size()) +
                        " inputs, got " + std::to_string(inputs.size()));
    }
    for (size_t i = 0; i < inputs.size(); ++i) {
      const TensorDef& t = g_.tensor(g_.inputs[i]);
      if (inputs[i].shape != t.nhwc()) {
        throw ConfigError("oracle: input " + std::to_string(i) + " has shape " +
                          inputs[i].shape.str() + ", model expects " + t.nhwc().str());
      }
      OracleValue v{inputs[i].shape, {}};
      v.data.assign(inputs[i].data.begin(), inputs[i].data.end());
      values_[t.id] = std::move(v);
    }
    for (const Node& n : g_.nodes) eval(n);
    return std::move(values_);
  }

 private:
  const OracleValue& in(const Node& n, size_t i) {
    auto it = values_.find(n.inputs[i]);
    if (it == values_.end()) {
      throw GraphError(n.id, "oracle: input tensor " + std::to_string(n.inputs[i]) +
                                 " not computed");
    }
    return it->second;
  }

  double sign(double x) {
    if (x != 0.0 && trace_) {
      trace_->min_sign_margin = std::min(trace_->min_sign_margin, std::abs(x));
    }
    return x < 0.0 ? -1.0 : 1.0;
  }

  static double activation(double x, const kernels::Activation& act) {
    switch (act.kind) {
      case kernels::ActivationKind::kNone: return x;
      case kernels::ActivationKind::kRelu: return std::max(x, 0.0);
      case kernels::ActivationKind::kClampedRelu:
        return std::min(std::max(x, 0.0), static_cast<double>(act.cap));
    }
    return x;
  }

  // Weight value (o, y, x, c) as +-1 or float, from either storage kind.
  static std::vector<double> weight_values(const TensorDef& w) {
    std::vector<double> out(w.elements());
    if (w.dtype == DType::kBitpacked) {
      const int c = w.shape.back();
      const int wpp = packed_words(c);
      const auto& words = w.words();
      const int64_t rows = w.elements() / c;
      for (int64_t r = 0; r < rows; ++r) {
        for (int k = 0; k < c; ++k) {
          const bool bit = (words[r * wpp + k / kWordBits] >> (k % kWordBits)) & 1u;
          out[r * c + k] = bit ? -1.0 : 1.0;
        }
      }
    } else {
      const auto& f = w.floats();
      std::copy(f.begin(), f.end(), out.begin());
    }
    return out;
  }

  // Plain convolution sum with an explicit fill value for padded taps;
  // `pad` is ignored for valid geometry.
  static OracleValue convolve(const OracleValue& x, const std::vector<double>& w,
                              const std::vector<int>& wshape, int stride_h, int stride_w,
                              bool same, double pad) {
    const int out_c = wshape[0], kh = wshape[1], kw = wshape[2], in_c = wshape[3];
    const auto geo = kernels::make_geometry(x.shape.height, x.shape.width, kh, kw,
                                            stride_h, stride_w, same);
    OracleValue y{{x.shape.batch, geo.out_h, geo.out_w, out_c}, {}};
    y.data.assign(y.shape.elements(), 0.0);
    for (int b = 0; b < x.shape.batch; ++b) {
      for (int oy = 0; oy < geo.out_h; ++oy) {
        for (int ox = 0; ox < geo.out_w; ++ox) {
          for (int o = 0; o < out_c; ++o) {
            double sum = 0.0;
            for (int ky = 0; ky < kh; ++ky) {
              for (int kx = 0; kx < kw; ++kx) {
                const int iy = oy * stride_h - geo.pad_top + ky;
                const int ix = ox * stride_w - geo.pad_left + kx;
                const bool inside =
                    iy >= 0 && iy < x.shape.height && ix >= 0 && ix < x.shape.width;
                for (int c = 0; c < in_c; ++c) {
                  const double wv = w[((static_cast<size_t>(o) * kh + ky) * kw + kx) * in_c + c];
                  const double xv =
                      inside ? x.data[((static_cast<size_t>(b) * x.shape.height + iy) *
                                           x.shape.width + ix) * in_c + c]
                             : pad;
                  sum += xv * wv;
                }
              }
            }
            y.data[((static_cast<size_t>(b) * geo.out_h + oy) * geo.out_w + ox) * out_c + o] =
                sum;
          }
        }
      }
    }
    return y;
  }

  static OracleValue pool(const OracleValue& x, const kernels::PoolParams& p) {
    const auto geo = kernels::make_geometry(p, x.shape.height, x.shape.width);
    const int c = x.shape.channels;
    OracleValue y{{x.shape.batch, geo.out_h, geo.out_w, c}, {}};
    y.data.assign(y.shape.elements(), -std::numeric_limits<double>::infinity());
    for (int b = 0; b < x.shape.batch; ++b) {
      for (int oy = 0; oy < geo.out_h; ++oy) {
        for (int ox = 0; ox < geo.out_w; ++ox) {
          for (int ky = 0; ky < p.pool_h; ++ky) {
            for (int kx = 0; kx < p.pool_w; ++kx) {
              const int iy = oy * p.stride_h - geo.pad_top + ky;
              const int ix = ox * p.stride_w - geo.pad_left + kx;
              if (iy < 0 || iy >= x.shape.height || ix < 0 || ix >= x.shape.width) continue;
              for (int k = 0; k < c; ++k) {
                double& out =
                    y.data[((static_cast<size_t>(b) * geo.out_h + oy) * geo.out_w + ox) * c + k];
                out = std::max(out, x.data[((static_cast<size_t>(b) * x.shape.height + iy) *
                                                x.shape.width + ix) * c + k]);
              }
            }
          }
        }
      }
    }
    return y;
  }

  void eval(const Node& n) {
    OracleValue y;
    switch (n.op) {
      case OpKind::kSign:
      case OpKind::kQuantize: {
        y = in(n, 0);
        for (double& v : y.data) v = sign(v);
        break;
      }
      case OpKind::kDequantize:
        y = in(n, 0);
        break;
      case OpKind::kReLU: {
        y = in(n, 0);
        const double cap = n.attr<graph::ReluAttrs>().cap;
        for (double& v : y.data) {
          v = std::max(v, 0.0);
          if (cap >= 0) v = std::min(v, cap);
        }
        break;
      }
      case OpKind::kAdd: {
        y = in(n, 0);
        const OracleValue& b = in(n, 1);
        for (size_t i = 0; i < y.data.size(); ++i) y.data[i] += b.data[i];
        break;
      }
      case OpKind::kMaxPool2D:
      case OpKind::kBMaxPool2D:
        y = pool(in(n, 0), n.attr<graph::PoolAttrs>().params);
        break;
      case OpKind::kBatchNorm: {
        y = in(n, 0);
        const auto& bn = n.attr<graph::BatchNormAttrs>();
        const int c = y.shape.channels;
        for (size_t i = 0; i < y.data.size(); ++i) {
          const int k = static_cast<int>(i % c);
          const double scale = bn.gamma[k] / std::sqrt(double{bn.variance[k]} + bn.epsilon);
          y.data[i] = scale * (y.data[i] - bn.mean[k]) + bn.beta[k];
        }
        break;
      }
      case OpKind::kGlobalAvgPool: {
        const OracleValue& x = in(n, 0);
        const int c = x.shape.channels;
        const int64_t hw = int64_t{x.shape.height} * x.shape.width;
        y.shape = {x.shape.batch, 1, 1, c};
        y.data.assign(y.shape.elements(), 0.0);
        for (int b = 0; b < x.shape.batch; ++b) {
          for (int64_t p = 0; p < hw; ++p) {
            for (int k = 0; k < c; ++k) y.data[b * c + k] += x.data[(b * hw + p) * c + k];
          }
          for (int k = 0; k < c; ++k) y.data[b * c + k] /= static_cast<double>(hw);
        }
        break;
      }
      case OpKind::kDense: {
        const OracleValue& x = in(n, 0);
        const TensorDef& w = g_.tensor(n.inputs[1]);
        const int out_f = w.shape[0], in_f = w.shape[1];
        const auto& wf = w.floats();
        y.shape = {x.shape.batch, 1, 1, out_f};
        y.data.assign(y.shape.elements(), 0.0);
        for (int b = 0; b < x.shape.batch; ++b) {
          for (int o = 0; o < out_f; ++o) {
            double sum = 0.0;
            for (int i = 0; i < in_f; ++i) {
              sum += x.data[static_cast<size_t>(b) * in_f + i] * wf[static_cast<size_t>(o) * in_f + i];
            }
            if (n.inputs.size() == 3) sum += g_.tensor(n.inputs[2]).floats()[o];
            y.data[static_cast<size_t>(b) * out_f + o] = sum;
          }
        }
        break;
      }
      case OpKind::kConv2D: {
        const auto& a = n.attr<graph::Conv2DAttrs>();
        const TensorDef& w = g_.tensor(n.inputs[1]);
        y = convolve(in(n, 0), weight_values(w), w.shape, a.stride_h, a.stride_w,
                     a.same_padding, a.pad_value);
        const int c = y.shape.channels;
        const std::vector<float>* bias =
            n.inputs.size() == 3 ? &g_.tensor(n.inputs[2]).floats() : nullptr;
        for (size_t i = 0; i < y.data.size(); ++i) {
          const int k = static_cast<int>(i % c);
          const double m = a.multiplier.empty() ? 1.0 : a.multiplier[k];
          y.data[i] = m * y.data[i] + (bias ? (*bias)[k] : 0.0) +
                      (a.bias.empty() ? 0.0 : a.bias[k]);
        }
        break;
      }
      case OpKind::kBConv2D:
        y = bconv(n);
        break;
    }
    values_[n.outputs[0]] = std::move(y);
  }

  OracleValue bconv(const Node& n) {
    const auto& a = n.attr<graph::BConv2DAttrs>();
    const TensorDef& w = g_.tensor(n.inputs[1]);
    std::vector<double> wv = weight_values(w);
    for (double& v : wv) v = v < 0.0 ? -1.0 : 1.0;
    // One padding fills +1; both zero forms fill 0, the correction tensor
    // only matters to the optimized kernel.
    const double pad = a.padding == BConvPadding::kOne ? 1.0 : 0.0;
    OracleValue y = convolve(in(n, 0), wv, w.shape, a.stride_h, a.stride_w,
                             a.same_padding(), pad);
    const int c = y.shape.channels;
    const int dot_length = w.shape[1] * w.shape[2] * w.shape[3];
    const bool bitpacked = a.output == kernels::OutputKind::kBitpacked;
    for (size_t i = 0; i < y.data.size(); ++i) {
      const int k = static_cast<int>(i % c);
      const double dot = y.data[i];
      if (bitpacked && !a.thresholds.channels.empty()) {
        const double acc_eff = (dot_length - dot) / 2.0;
        y.data[i] = a.thresholds.bit(k, acc_eff) ? -1.0 : 1.0;
        continue;
      }
      const double v = a.multiplier[k] * activation(dot, a.activation) + a.bias[k];
      y.data[i] = bitpacked ? sign(v) : v;
    }
    return y;
  }

  const Graph& g_;
  OracleTrace* trace_;
  std::map<TensorId, OracleValue> values_;
};

}  // namespace

std::map<TensorId, OracleValue> evaluate_oracle(const Graph& g,
                                                const std::vector<FloatTensor>& inputs,
                                                OracleTrace* trace) {
  return Oracle(g, trace).run(inputs);
}

std::vector<FloatTensor> run_oracle(const Graph& g, const std::vector<FloatTensor>& inputs,
                                    OracleTrace* trace) {
  auto values = evaluate_oracle(g, inputs, trace);
  std::vector<FloatTensor> out;
  for (TensorId id : g.outputs) {
    auto it = values.find(id);
    if (it == values.end()) {
      throw GraphError("", "oracle: output tensor " + std::to_string(id) + " not computed");
    }
    std::vector<float> data(it->second.data.begin(), it->second.data.end());
    out.emplace_back(it->second.shape, std::move(data));
  }
  return out;
}

}  // namespace binconv::runtime
