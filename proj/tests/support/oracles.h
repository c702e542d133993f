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

#ifndef BINCONV_TESTS_SUPPORT_ORACLES_H_
#define BINCONV_TESTS_SUPPORT_ORACLES_H_

// Scalar reference implementations used as test oracles. They work on plain
// values with naive loops and share no code with the library kernels.

#include <cstdint>
#include <random>
#include <vector>

#include "binconv/core/tensor.h"

namespace binconv::testing {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi);  // inclusive
double uniform(Rng& rng, double lo, double hi);
FloatTensor random_normal(Rng& rng, const Shape& s, float stddev = 1.0f);
// Values in {-1, +1}.
FloatTensor random_signs(Rng& rng, const Shape& s);

// +1 for x >= 0 (including -0.0), -1 otherwise.
inline double sign_pm1(double x) { return x < 0 ? -1.0 : 1.0; }

// Sum of x[i] * w[i] over +-1 values.
int64_t pm1_dot(const std::vector<int>& x, const std::vector<int>& w);

// Padding that makes out = ceil(in / stride); the odd pixel goes to the end.
struct SamePad {
  int out = 0;
  int before = 0;
};
SamePad same_pad(int in, int kernel, int stride);

struct ConvSpec {
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;
  bool same = false;
  double pad_value = 0.0;  // value read for out-of-bounds taps
};

// Direct convolution in double. weights: Shape{out, kh, kw, in}. Returns
// the raw sums as a tensor of doubles in NHWC order plus the output shape.
struct ConvResult {
  Shape shape;
  std::vector<double> values;
};
ConvResult naive_conv(const FloatTensor& input, const FloatTensor& weights, const ConvSpec& spec);

enum class Act { kNone, kRelu, kClamp };
double activate(double x, Act act, double cap);

// m * act(x) + b per output channel.
std::vector<double> affine(const ConvResult& r, const std::vector<double>& m,
                           const std::vector<double>& b, Act act, double cap);

// Window max over in-bounds taps.
FloatTensor naive_maxpool(const FloatTensor& x, int pool, int stride, bool same);

// Sign bits (1 for negative) of a float tensor, one vector per element.
std::vector<int> sign_bits(const FloatTensor& x);
// Bits of a packed tensor read one by one with shifts, in NHWC element order.
std::vector<int> unpack_bits(const BitpackedTensor& t);

}  // namespace binconv::testing

#endif  // BINCONV_TESTS_SUPPORT_ORACLES_H_
