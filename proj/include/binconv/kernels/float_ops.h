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

#ifndef BINCONV_KERNELS_FLOAT_OPS_H_
#define BINCONV_KERNELS_FLOAT_OPS_H_

#include <span>
#include <vector>

#include "binconv/core/tensor.h"
#include "binconv/kernels/bconv.h"

namespace binconv::kernels {

struct PoolParams {
  int pool_h = 2;
  int pool_w = 2;
  int stride_h = 2;
  int stride_w = 2;
  bool same_padding = false;
};

ConvGeometry make_geometry(const PoolParams& p, int in_h, int in_w);

// Window maximum over in-bounds taps only.
void maxpool(const float* input, const Shape& in_shape, const PoolParams& p,
             float* output);
FloatTensor maxpool(const FloatTensor& input, const PoolParams& p);

// AND of the in-bounds window words: the output sign is -1 only if every
// input in the window is -1, which is max() in the +-1 domain.
void bmaxpool(const uint32_t* input, const Shape& in_shape, const PoolParams& p,
              uint32_t* output);
BitpackedTensor bmaxpool(const BitpackedTensor& input, const PoolParams& p);

struct Conv2DParams {
  int stride_h = 1;
  int stride_w = 1;
  bool same_padding = false;
  float pad_value = 0.0f;
};

// Float convolution baseline: im2col followed by a blocked GEMM.
// `weights_kn` is the weight matrix transposed to (kernel_h*kernel_w*in, out).
struct FloatConvPlan {
  int kernel_h = 1;
  int kernel_w = 1;
  int in_channels = 0;
  int out_channels = 0;
  Conv2DParams params;
  ConvGeometry geom;
  std::vector<float> weights_kn;
  std::vector<float> multiplier;  // empty means 1
  std::vector<float> bias;        // empty means 0

  bool direct() const {
    return kernel_h == 1 && kernel_w == 1 && params.stride_h == 1 &&
           params.stride_w == 1;
  }
  size_t scratch_floats(int batch) const;
};

// weights: (out, kernel_h, kernel_w, in) stored as Shape{out, kh, kw, in}.
FloatConvPlan prepare_conv2d(const FloatTensor& weights, const Conv2DParams& p,
                             int in_h, int in_w, std::vector<float> multiplier,
                             std::vector<float> bias);
void conv2d(const FloatConvPlan& plan, const float* input, int batch,
            float* scratch, float* output, int threads);
FloatTensor conv2d(const FloatTensor& input, const FloatTensor& weights,
                   const Conv2DParams& p, std::span<const float> multiplier = {},
                   std::span<const float> bias = {}, int threads = 1);

// C[m x n] = A[m x k] * B[k x n], all row-major. Rows of C are partitioned
// across workers.
void sgemm(int m, int n, int k, const float* a, const float* b, float* c,
           int threads);

void add(std::span<const float> a, std::span<const float> b, std::span<float> out);
FloatTensor add(const FloatTensor& a, const FloatTensor& b);

// cap < 0 means unbounded.
void relu(std::span<const float> in, float cap, std::span<float> out);
FloatTensor relu(const FloatTensor& in, float cap = -1.0f);

struct BatchNormParams {
  std::vector<float> gamma, beta, mean, variance;
  float epsilon = 1e-3f;
};
void batch_norm(const float* in, int64_t pixels, const BatchNormParams& p,
                float* out);
FloatTensor batch_norm(const FloatTensor& in, const BatchNormParams& p);

// Fully connected layer over the flattened (height, width, channels) features.
// weights_io: (in_features, out_features) row-major.
void dense(const float* in, int batch, int in_features, const float* weights_io,
           std::span<const float> bias, int out_features, float* out,
           int threads);
// weights: (out, in) stored as Shape{out, 1, 1, in}.
FloatTensor dense(const FloatTensor& in, const FloatTensor& weights,
                  std::span<const float> bias = {});

void global_avg_pool(const float* in, const Shape& in_shape, float* out);
FloatTensor global_avg_pool(const FloatTensor& in);

}  // namespace binconv::kernels

#endif  // BINCONV_KERNELS_FLOAT_OPS_H_
