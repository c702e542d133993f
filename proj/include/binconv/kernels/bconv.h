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

#ifndef BINCONV_KERNELS_BCONV_H_
#define BINCONV_KERNELS_BCONV_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "binconv/core/tensor.h"

namespace binconv::kernels {

enum class PaddingMode { kValid, kOne, kZeroCorrected };

enum class ActivationKind { kNone, kRelu, kClampedRelu };

struct Activation {
  ActivationKind kind = ActivationKind::kNone;
  float cap = 0.0f;  // only read for kClampedRelu

  friend bool operator==(const Activation&, const Activation&) = default;
};

inline float apply_activation(float x, const Activation& act) {
  switch (act.kind) {
    case ActivationKind::kNone:
      return x;
    case ActivationKind::kRelu:
      return x > 0.0f ? x : 0.0f;
    case ActivationKind::kClampedRelu:
      return x > 0.0f ? (x < act.cap ? x : act.cap) : 0.0f;
  }
  return x;
}

inline double apply_activation(double x, const Activation& act) {
  switch (act.kind) {
    case ActivationKind::kNone:
      return x;
    case ActivationKind::kRelu:
      return x > 0.0 ? x : 0.0;
    case ActivationKind::kClampedRelu:
      return x > 0.0 ? (x < act.cap ? x : double{act.cap}) : 0.0;
  }
  return x;
}

// Fused output transform of one channel: gamma * act(dot) + beta. Both the
// float output path and threshold extraction go through this function so the
// two agree bit for bit. The affine runs in double and is rounded once.
inline float transform_dot(int64_t dot, const Activation& act, double gamma,
                           double beta) {
  return static_cast<float>(
      gamma * apply_activation(static_cast<double>(dot), act) + beta);
}

enum class OutputKind { kFloat, kBitpacked };

// Accumulator threshold of one output channel. The comparison is made on the
// effective accumulator acc_eff = (n - dot) / 2, which is an integer for
// valid/one padding and may be a half-integer after zero-padding correction.
struct ChannelThreshold {
  double tau = 0.0;
  bool flip = false;
  std::optional<bool> constant;

  bool bit(double acc_eff) const {
    if (constant) return *constant;
    return flip ? acc_eff < tau : acc_eff > tau;
  }
  friend bool operator==(const ChannelThreshold&,
                         const ChannelThreshold&) = default;
};

struct ThresholdSet {
  std::vector<ChannelThreshold> channels;

  bool bit(int channel, double acc_eff) const {
    return channels[channel].bit(acc_eff);
  }
  friend bool operator==(const ThresholdSet&, const ThresholdSet&) = default;
};

struct BConvDescriptor {
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;
  int in_channels = 0;
  int out_channels = 0;
  PaddingMode padding = PaddingMode::kValid;
  Activation activation;
  std::vector<double> multiplier;
  std::vector<double> bias;
  OutputKind output_kind = OutputKind::kFloat;
  ThresholdSet thresholds;  // used when output_kind == kBitpacked

  // n: length of the +-1 dot product of one output value.
  int dot_length() const { return kernel_h * kernel_w * in_channels; }
  int words_per_tap() const { return packed_words(in_channels); }
  int words_per_row() const { return kernel_h * kernel_w * words_per_tap(); }

  // Throws ConfigError when the record is inconsistent.
  void check() const;
};

struct ConvGeometry {
  int in_h = 0;
  int in_w = 0;
  int out_h = 0;
  int out_w = 0;
  int pad_top = 0;
  int pad_left = 0;
};

// "same" padding follows the usual convention: out = ceil(in / stride) with
// the extra padding row/column placed at the bottom/right.
ConvGeometry make_geometry(int in_h, int in_w, int kernel_h, int kernel_w,
                           int stride_h, int stride_w, bool same_padding);
ConvGeometry make_geometry(const BConvDescriptor& desc, int in_h, int in_w);

struct BitpackedMatrix {
  int rows = 0;
  int words_per_row = 0;
  std::vector<uint32_t> data;

  const uint32_t* row(int r) const {
    return data.data() + static_cast<size_t>(r) * words_per_row;
  }
};

struct AccumulatorMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int32_t> data;

  int32_t at(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }
};

// Integer correction for zero padding, grouped by output position class. Two
// output rows share a row class when the same kernel rows fall outside the
// input; likewise for columns.
struct PaddingCorrection {
  std::vector<int> row_class;  // per output row
  std::vector<int> col_class;  // per output column
  int num_row_classes = 0;
  int num_col_classes = 0;
  int out_channels = 0;
  std::vector<int32_t> values;  // [row_class][col_class][out_channel]

  bool empty() const { return values.empty(); }
  int32_t at(int oy, int ox, int channel) const {
    return values[(static_cast<size_t>(row_class[oy]) * num_col_classes +
                   col_class[ox]) * out_channels + channel];
  }
};

// Per-output-row and per-output-column classes for a padded geometry, plus
// the number of kernel taps cut off on each side for every class.
struct PositionClasses {
  std::vector<int> row_class;
  std::vector<int> col_class;
  std::vector<std::pair<int, int>> row_cut;  // (top, bottom) per class
  std::vector<std::pair<int, int>> col_cut;  // (left, right) per class
};
PositionClasses position_classes(const ConvGeometry& geom, int kernel_h,
                                 int kernel_w, int stride_h, int stride_w);

// Weight tensor shaped (out, kernel_h, kernel_w, in) viewed as one packed row
// per output channel.
BitpackedMatrix weight_matrix(const BitpackedTensor& weights);

// Rows are output positions in (batch, y, x) order; each row holds the packed
// receptive field tap by tap. Out-of-bounds taps are filled with zero bits.
void im2col_bitpacked(std::span<const uint32_t> input, const Shape& in_shape,
                      const ConvGeometry& geom, int kernel_h, int kernel_w,
                      int stride_h, int stride_w, std::span<uint32_t> output);
BitpackedMatrix im2col_bitpacked(const BitpackedTensor& input,
                                 const BConvDescriptor& desc);

// acc[r][c] = sum over words of popcount(lhs[r] ^ weights[c]). Output rows are
// partitioned across `threads` workers.
void bgemm(const uint32_t* lhs, int rows, const uint32_t* weights, int cols,
           int words, int32_t* acc, int threads);
AccumulatorMatrix bgemm(const BitpackedMatrix& lhs,
                        const BitpackedMatrix& weights, int threads = 1);

inline int64_t accumulator_to_dot(int dot_length, int32_t acc) {
  return dot_length - 2 * int64_t{acc};
}

// Row range [row_begin, row_end) of the float output transform. `correction`
// may be null; rows are indexed as in im2col.
void output_transform_float(const int32_t* acc, int row_begin, int row_end,
                            const BConvDescriptor& desc, int out_h, int out_w,
                            const PaddingCorrection* correction, float* out);
FloatTensor output_transform_float(const AccumulatorMatrix& acc,
                                   const BConvDescriptor& desc,
                                   const Shape& out_shape,
                                   const PaddingCorrection* correction = nullptr);

// Precomputed integer form of a ThresholdSet: compares 2 * acc_eff.
struct DoubledThresholds {
  enum class Mode : uint8_t { kGreater, kLess, kZero, kOne };
  std::vector<int64_t> limit;
  std::vector<Mode> mode;
};
DoubledThresholds doubled_thresholds(const ThresholdSet& set);

void output_transform_bitpacked(const int32_t* acc, int row_begin, int row_end,
                                int out_channels,
                                const DoubledThresholds& thresholds, int out_h,
                                int out_w, const PaddingCorrection* correction,
                                uint32_t* out);
BitpackedTensor output_transform_bitpacked(
    const AccumulatorMatrix& acc, const BConvDescriptor& desc,
    const Shape& out_shape, const PaddingCorrection* correction = nullptr);

struct ThresholdFit {
  ThresholdSet set;
  std::vector<int> non_monotone;  // channels that admit no single threshold
};

// Scans every effective accumulator value 0, 0.5, ..., n and extracts the
// comparison that reproduces sign(transform(dot)) on all of them.
ThresholdFit compute_thresholds(const BConvDescriptor& desc);

PaddingCorrection build_padding_correction(const BitpackedTensor& weights,
                                           const BConvDescriptor& desc,
                                           int in_h, int in_w);

// Full pipeline over value types, used by tests and the sweep harness.
FloatTensor bconv2d_float(const BitpackedTensor& input,
                          const BitpackedTensor& weights,
                          const BConvDescriptor& desc,
                          const PaddingCorrection* correction = nullptr,
                          int threads = 1);
BitpackedTensor bconv2d_bitpacked(const BitpackedTensor& input,
                                  const BitpackedTensor& weights,
                                  const BConvDescriptor& desc,
                                  const PaddingCorrection* correction = nullptr,
                                  int threads = 1);

}  // namespace binconv::kernels

#endif  // BINCONV_KERNELS_BCONV_H_
