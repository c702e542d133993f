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

#include "binconv/kernels/float_ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "binconv/core/error.h"
#include "binconv/kernels/parallel.h"

namespace binconv::kernels {

ConvGeometry make_geometry(const PoolParams& p, int in_h, int in_w) {
  return make_geometry(in_h, in_w, p.pool_h, p.pool_w, p.stride_h, p.stride_w,
                       p.same_padding);
}

void maxpool(const float* input, const Shape& in_shape, const PoolParams& p,
             float* output) {
  const ConvGeometry g = make_geometry(p, in_shape.height, in_shape.width);
  const int ch = in_shape.channels;
  float* out = output;
  for (int n = 0; n < in_shape.batch; ++n) {
    const float* image =
        input + static_cast<size_t>(n) * in_shape.height * in_shape.width * ch;
    for (int oy = 0; oy < g.out_h; ++oy) {
      const int y0 = std::max(0, oy * p.stride_h - g.pad_top);
      const int y1 = std::min(in_shape.height, oy * p.stride_h - g.pad_top + p.pool_h);
      for (int ox = 0; ox < g.out_w; ++ox) {
        const int x0 = std::max(0, ox * p.stride_w - g.pad_left);
        const int x1 = std::min(in_shape.width, ox * p.stride_w - g.pad_left + p.pool_w);
        std::fill_n(out, ch, -std::numeric_limits<float>::infinity());
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) {
            const float* px = image + (static_cast<size_t>(y) * in_shape.width + x) * ch;
            for (int c = 0; c < ch; ++c) out[c] = std::max(out[c], px[c]);
          }
        }
        out += ch;
      }
    }
  }
}

FloatTensor maxpool(const FloatTensor& input, const PoolParams& p) {
  const ConvGeometry g = make_geometry(p, input.shape.height, input.shape.width);
  FloatTensor out({input.shape.batch, g.out_h, g.out_w, input.shape.channels});
  maxpool(input.data.data(), input.shape, p, out.data.data());
  return out;
}

void bmaxpool(const uint32_t* input, const Shape& in_shape, const PoolParams& p,
              uint32_t* output) {
  const ConvGeometry g = make_geometry(p, in_shape.height, in_shape.width);
  const int wpp = packed_words(in_shape.channels);
  uint32_t* out = output;
  for (int n = 0; n < in_shape.batch; ++n) {
    const uint32_t* image =
        input + static_cast<size_t>(n) * in_shape.height * in_shape.width * wpp;
    for (int oy = 0; oy < g.out_h; ++oy) {
      const int y0 = std::max(0, oy * p.stride_h - g.pad_top);
      const int y1 = std::min(in_shape.height, oy * p.stride_h - g.pad_top + p.pool_h);
      for (int ox = 0; ox < g.out_w; ++ox) {
        const int x0 = std::max(0, ox * p.stride_w - g.pad_left);
        const int x1 = std::min(in_shape.width, ox * p.stride_w - g.pad_left + p.pool_w);
        std::fill_n(out, wpp, ~0u);
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) {
            const uint32_t* px =
                image + (static_cast<size_t>(y) * in_shape.width + x) * wpp;
            for (int k = 0; k < wpp; ++k) out[k] &= px[k];
          }
        }
        out += wpp;
      }
    }
  }
}

BitpackedTensor bmaxpool(const BitpackedTensor& input, const PoolParams& p) {
  const ConvGeometry g = make_geometry(p, input.shape.height, input.shape.width);
  BitpackedTensor out({input.shape.batch, g.out_h, g.out_w, input.shape.channels});
  bmaxpool(input.words.data(), input.shape, p, out.words.data());
  return out;
}

namespace {

constexpr int kBlockK = 128;
constexpr int kTileRows = 4;
constexpr int kTileCols = 64;

// Accumulates a kTileRows x cols tile of C over k in [k0, k1).
template <int Rows>
void gemm_tile(int n, int k, int k0, int k1, int j0, int cols, const float* a,
               const float* b, float* c) {
  float acc[Rows][kTileCols];
  for (int i = 0; i < Rows; ++i) {
    for (int j = 0; j < cols; ++j) acc[i][j] = c[static_cast<size_t>(i) * n + j0 + j];
  }
  for (int p = k0; p < k1; ++p) {
    const float* brow = b + static_cast<size_t>(p) * n + j0;
    for (int i = 0; i < Rows; ++i) {
      const float av = a[static_cast<size_t>(i) * k + p];
      if (cols == kTileCols) {
        for (int j = 0; j < kTileCols; ++j) acc[i][j] = std::fma(av, brow[j], acc[i][j]);
      } else {
        for (int j = 0; j < cols; ++j) acc[i][j] = std::fma(av, brow[j], acc[i][j]);
      }
    }
  }
  for (int i = 0; i < Rows; ++i) {
    for (int j = 0; j < cols; ++j) c[static_cast<size_t>(i) * n + j0 + j] = acc[i][j];
  }
}

void sgemm_rows(int r0, int r1, int n, int k, const float* a, const float* b,
                float* c) {
  std::fill(c + static_cast<size_t>(r0) * n, c + static_cast<size_t>(r1) * n, 0.0f);
  for (int k0 = 0; k0 < k; k0 += kBlockK) {
    const int k1 = std::min(k, k0 + kBlockK);
    int r = r0;
    for (; r + kTileRows <= r1; r += kTileRows) {
      for (int j0 = 0; j0 < n; j0 += kTileCols) {
        gemm_tile<kTileRows>(n, k, k0, k1, j0, std::min(kTileCols, n - j0),
                             a + static_cast<size_t>(r) * k, b,
                             c + static_cast<size_t>(r) * n);
      }
    }
    for (; r < r1; ++r) {
      for (int j0 = 0; j0 < n; j0 += kTileCols) {
        gemm_tile<1>(n, k, k0, k1, j0, std::min(kTileCols, n - j0),
                     a + static_cast<size_t>(r) * k, b,
                     c + static_cast<size_t>(r) * n);
      }
    }
  }
}

}  // namespace

void sgemm(int m, int n, int k, const float* a, const float* b, float* c,
           int threads) {
  // Keep row chunks aligned to the tile height so results do not depend on the
  // thread count.
  const int64_t tiles = (m + kTileRows - 1) / kTileRows;
  parallel_for(0, tiles, threads, [&](int64_t lo, int64_t hi) {
    sgemm_rows(static_cast<int>(lo * kTileRows),
               static_cast<int>(std::min<int64_t>(m, hi * kTileRows)), n, k, a,
               b, c);
  });
}

size_t FloatConvPlan::scratch_floats(int batch) const {
  if (direct()) return 0;
  return static_cast<size_t>(batch) * geom.out_h * geom.out_w * kernel_h *
         kernel_w * in_channels;
}

FloatConvPlan prepare_conv2d(const FloatTensor& weights, const Conv2DParams& p,
                             int in_h, int in_w, std::vector<float> multiplier,
                             std::vector<float> bias) {
  FloatConvPlan plan;
  plan.out_channels = weights.shape.batch;
  plan.kernel_h = weights.shape.height;
  plan.kernel_w = weights.shape.width;
  plan.in_channels = weights.shape.channels;
  plan.params = p;
  if (p.stride_h < 1 || p.stride_w < 1) throw ConfigError("conv2d: bad stride");
  plan.geom = make_geometry(in_h, in_w, plan.kernel_h, plan.kernel_w, p.stride_h,
                            p.stride_w, p.same_padding);
  if (!multiplier.empty() && static_cast<int>(multiplier.size()) != plan.out_channels) {
    throw ConfigError("conv2d: multiplier length does not match output channels");
  }
  if (!bias.empty() && static_cast<int>(bias.size()) != plan.out_channels) {
    throw ConfigError("conv2d: bias length does not match output channels");
  }
  plan.multiplier = std::move(multiplier);
  plan.bias = std::move(bias);
  const int kk = plan.kernel_h * plan.kernel_w * plan.in_channels;
  plan.weights_kn.resize(static_cast<size_t>(kk) * plan.out_channels);
  for (int o = 0; o < plan.out_channels; ++o) {
    for (int t = 0; t < kk; ++t) {
      plan.weights_kn[static_cast<size_t>(t) * plan.out_channels + o] =
          weights.data[static_cast<size_t>(o) * kk + t];
    }
  }
  return plan;
}

namespace {

void im2col_float(const float* input, int batch, const FloatConvPlan& plan,
                  float* out) {
  const ConvGeometry& g = plan.geom;
  const int ch = plan.in_channels;
  for (int n = 0; n < batch; ++n) {
    const float* image = input + static_cast<size_t>(n) * g.in_h * g.in_w * ch;
    for (int oy = 0; oy < g.out_h; ++oy) {
      for (int ox = 0; ox < g.out_w; ++ox) {
        for (int ky = 0; ky < plan.kernel_h; ++ky) {
          const int iy = oy * plan.params.stride_h - g.pad_top + ky;
          for (int kx = 0; kx < plan.kernel_w; ++kx) {
            const int ix = ox * plan.params.stride_w - g.pad_left + kx;
            if (iy < 0 || iy >= g.in_h || ix < 0 || ix >= g.in_w) {
              std::fill_n(out, ch, plan.params.pad_value);
            } else {
              std::copy_n(image + (static_cast<size_t>(iy) * g.in_w + ix) * ch, ch, out);
            }
            out += ch;
          }
        }
      }
    }
  }
}

}  // namespace

void conv2d(const FloatConvPlan& plan, const float* input, int batch,
            float* scratch, float* output, int threads) {
  const int rows = batch * plan.geom.out_h * plan.geom.out_w;
  const int kk = plan.kernel_h * plan.kernel_w * plan.in_channels;
  const float* lhs = input;
  if (!plan.direct()) {
    im2col_float(input, batch, plan, scratch);
    lhs = scratch;
  }
  sgemm(rows, plan.out_channels, kk, lhs, plan.weights_kn.data(), output, threads);
  if (plan.multiplier.empty() && plan.bias.empty()) return;
  for (int r = 0; r < rows; ++r) {
    float* o = output + static_cast<size_t>(r) * plan.out_channels;
    for (int c = 0; c < plan.out_channels; ++c) {
      float v = o[c];
      if (!plan.multiplier.empty()) v *= plan.multiplier[c];
      if (!plan.bias.empty()) v += plan.bias[c];
      o[c] = v;
    }
  }
}

FloatTensor conv2d(const FloatTensor& input, const FloatTensor& weights,
                   const Conv2DParams& p, std::span<const float> multiplier,
                   std::span<const float> bias, int threads) {
  if (input.shape.channels != weights.shape.channels) {
    throw ConfigError("conv2d: input has " + std::to_string(input.shape.channels) +
                      " channels, weights expect " +
                      std::to_string(weights.shape.channels));
  }
  const FloatConvPlan plan = prepare_conv2d(
      weights, p, input.shape.height, input.shape.width,
      {multiplier.begin(), multiplier.end()}, {bias.begin(), bias.end()});
  FloatTensor out({input.shape.batch, plan.geom.out_h, plan.geom.out_w,
                   plan.out_channels});
  std::vector<float> scratch(plan.scratch_floats(input.shape.batch));
  conv2d(plan, input.data.data(), input.shape.batch, scratch.data(),
         out.data.data(), threads);
  return out;
}

void add(std::span<const float> a, std::span<const float> b, std::span<float> out) {
  for (size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
}

FloatTensor add(const FloatTensor& a, const FloatTensor& b) {
  if (a.shape != b.shape) {
    throw ConfigError("add: shapes " + a.shape.str() + " and " + b.shape.str() +
                      " differ");
  }
  FloatTensor out(a.shape);
  add(a.data, b.data, out.data);
  return out;
}

void relu(std::span<const float> in, float cap, std::span<float> out) {
  const Activation act{cap < 0 ? ActivationKind::kRelu : ActivationKind::kClampedRelu,
                       cap};
  for (size_t i = 0; i < out.size(); ++i) out[i] = apply_activation(in[i], act);
}

FloatTensor relu(const FloatTensor& in, float cap) {
  FloatTensor out(in.shape);
  relu(in.data, cap, out.data);
  return out;
}

void batch_norm(const float* in, int64_t pixels, const BatchNormParams& p,
                float* out) {
  const size_t ch = p.gamma.size();
  std::vector<float> scale(ch), shift(ch);
  for (size_t c = 0; c < ch; ++c) {
    scale[c] = p.gamma[c] / std::sqrt(p.variance[c] + p.epsilon);
    shift[c] = p.beta[c] - scale[c] * p.mean[c];
  }
  for (int64_t px = 0; px < pixels; ++px) {
    for (size_t c = 0; c < ch; ++c) {
      out[px * ch + c] = in[px * ch + c] * scale[c] + shift[c];
    }
  }
}

FloatTensor batch_norm(const FloatTensor& in, const BatchNormParams& p) {
  const size_t ch = in.shape.channels;
  if (p.gamma.size() != ch || p.beta.size() != ch || p.mean.size() != ch ||
      p.variance.size() != ch) {
    throw ConfigError("batch_norm: parameter length does not match " +
                      std::to_string(ch) + " channels");
  }
  FloatTensor out(in.shape);
  batch_norm(in.data.data(), in.shape.pixels(), p, out.data.data());
  return out;
}

void dense(const float* in, int batch, int in_features, const float* weights_io,
           std::span<const float> bias, int out_features, float* out,
           int threads) {
  sgemm(batch, out_features, in_features, in, weights_io, out, threads);
  if (bias.empty()) return;
  for (int b = 0; b < batch; ++b) {
    for (int o = 0; o < out_features; ++o) {
      out[static_cast<size_t>(b) * out_features + o] += bias[o];
    }
  }
}

FloatTensor dense(const FloatTensor& in, const FloatTensor& weights,
                  std::span<const float> bias) {
  const int in_features = in.shape.height * in.shape.width * in.shape.channels;
  const int out_features = weights.shape.batch;
  if (weights.shape.elements() != int64_t{in_features} * out_features) {
    throw ConfigError("dense: weights " + weights.shape.str() +
                      " do not match input features " + std::to_string(in_features));
  }
  if (!bias.empty() && static_cast<int>(bias.size()) != out_features) {
    throw ConfigError("dense: bias length does not match output features");
  }
  std::vector<float> w_io(weights.data.size());
  for (int o = 0; o < out_features; ++o) {
    for (int i = 0; i < in_features; ++i) {
      w_io[static_cast<size_t>(i) * out_features + o] =
          weights.data[static_cast<size_t>(o) * in_features + i];
    }
  }
  FloatTensor out({in.shape.batch, 1, 1, out_features});
  dense(in.data.data(), in.shape.batch, in_features, w_io.data(), bias,
        out_features, out.data.data(), 1);
  return out;
}

void global_avg_pool(const float* in, const Shape& in_shape, float* out) {
  const int ch = in_shape.channels;
  const int64_t area = int64_t{in_shape.height} * in_shape.width;
  for (int n = 0; n < in_shape.batch; ++n) {
    float* o = out + static_cast<size_t>(n) * ch;
    std::fill_n(o, ch, 0.0f);
    const float* image = in + static_cast<size_t>(n) * area * ch;
    for (int64_t p = 0; p < area; ++p) {
      for (int c = 0; c < ch; ++c) o[c] += image[p * ch + c];
    }
    for (int c = 0; c < ch; ++c) o[c] /= static_cast<float>(area);
  }
}

FloatTensor global_avg_pool(const FloatTensor& in) {
  FloatTensor out({in.shape.batch, 1, 1, in.shape.channels});
  global_avg_pool(in.data.data(), in.shape, out.data.data());
  return out;
}

}  // namespace binconv::kernels
