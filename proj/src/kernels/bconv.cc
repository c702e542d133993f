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

#include "binconv/kernels/bconv.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <string>

#include "binconv/core/bitpack.h"
#include "binconv/core/error.h"
#include "binconv/kernels/parallel.h"

#if defined(__AVX512F__) && defined(__AVX512VPOPCNTDQ__)
#include <immintrin.h>
#define BINCONV_HAVE_AVX512_POPCNT 1
#endif

namespace binconv::kernels {

void BConvDescriptor::check() const {
  auto fail = [](const std::string& what) {
    throw ConfigError("bconv descriptor: " + what);
  };
  if (kernel_h < 1 || kernel_w < 1) fail("kernel must be at least 1x1");
  if (stride_h < 1 || stride_w < 1) fail("stride must be positive");
  if (in_channels < 1 || out_channels < 1) fail("channel counts must be positive");
  if (static_cast<int>(multiplier.size()) != out_channels) {
    fail("multiplier length " + std::to_string(multiplier.size()) +
         " != out_channels " + std::to_string(out_channels));
  }
  if (static_cast<int>(bias.size()) != out_channels) {
    fail("bias length " + std::to_string(bias.size()) + " != out_channels " +
         std::to_string(out_channels));
  }
  if (activation.kind == ActivationKind::kClampedRelu && !(activation.cap >= 0)) {
    fail("clamped relu cap must be non-negative");
  }
  if (output_kind == OutputKind::kBitpacked &&
      static_cast<int>(thresholds.channels.size()) != out_channels) {
    fail("bitpacked output needs one threshold per output channel");
  }
}

ConvGeometry make_geometry(int in_h, int in_w, int kernel_h, int kernel_w,
                           int stride_h, int stride_w, bool same_padding) {
  ConvGeometry g;
  g.in_h = in_h;
  g.in_w = in_w;
  if (same_padding) {
    g.out_h = (in_h + stride_h - 1) / stride_h;
    g.out_w = (in_w + stride_w - 1) / stride_w;
    const int pad_h = std::max((g.out_h - 1) * stride_h + kernel_h - in_h, 0);
    const int pad_w = std::max((g.out_w - 1) * stride_w + kernel_w - in_w, 0);
    g.pad_top = pad_h / 2;
    g.pad_left = pad_w / 2;
  } else {
    g.out_h = in_h >= kernel_h ? (in_h - kernel_h) / stride_h + 1 : 0;
    g.out_w = in_w >= kernel_w ? (in_w - kernel_w) / stride_w + 1 : 0;
  }
  if (g.out_h < 1 || g.out_w < 1) {
    throw ConfigError("kernel " + std::to_string(kernel_h) + "x" +
                      std::to_string(kernel_w) + " does not fit input " +
                      std::to_string(in_h) + "x" + std::to_string(in_w));
  }
  return g;
}

ConvGeometry make_geometry(const BConvDescriptor& desc, int in_h, int in_w) {
  return make_geometry(in_h, in_w, desc.kernel_h, desc.kernel_w, desc.stride_h,
                       desc.stride_w, desc.padding != PaddingMode::kValid);
}

namespace {

void classify(int out, int stride, int pad, int kernel, int in,
              std::vector<int>& cls, std::vector<std::pair<int, int>>& cuts) {
  std::map<std::pair<int, int>, int> index;
  cls.resize(out);
  for (int o = 0; o < out; ++o) {
    const int start = o * stride - pad;
    const std::pair<int, int> cut{std::max(0, -start),
                                  std::max(0, start + kernel - in)};
    auto [it, inserted] = index.emplace(cut, static_cast<int>(cuts.size()));
    if (inserted) cuts.push_back(cut);
    cls[o] = it->second;
  }
}

}  // namespace

PositionClasses position_classes(const ConvGeometry& geom, int kernel_h,
                                 int kernel_w, int stride_h, int stride_w) {
  PositionClasses pc;
  classify(geom.out_h, stride_h, geom.pad_top, kernel_h, geom.in_h,
           pc.row_class, pc.row_cut);
  classify(geom.out_w, stride_w, geom.pad_left, kernel_w, geom.in_w,
           pc.col_class, pc.col_cut);
  return pc;
}

BitpackedMatrix weight_matrix(const BitpackedTensor& weights) {
  BitpackedMatrix m;
  m.rows = weights.shape.batch;
  m.words_per_row =
      weights.shape.height * weights.shape.width * weights.words_per_pixel();
  m.data = weights.words;
  return m;
}

void im2col_bitpacked(std::span<const uint32_t> input, const Shape& in_shape,
                      const ConvGeometry& geom, int kernel_h, int kernel_w,
                      int stride_h, int stride_w, std::span<uint32_t> output) {
  const int wpp = packed_words(in_shape.channels);
  const size_t row_words = static_cast<size_t>(kernel_h) * kernel_w * wpp;
  uint32_t* out = output.data();
  for (int n = 0; n < in_shape.batch; ++n) {
    const uint32_t* image =
        input.data() + static_cast<size_t>(n) * in_shape.height * in_shape.width * wpp;
    for (int oy = 0; oy < geom.out_h; ++oy) {
      for (int ox = 0; ox < geom.out_w; ++ox) {
        uint32_t* row = out;
        for (int ky = 0; ky < kernel_h; ++ky) {
          const int iy = oy * stride_h - geom.pad_top + ky;
          for (int kx = 0; kx < kernel_w; ++kx) {
            const int ix = ox * stride_w - geom.pad_left + kx;
            if (iy < 0 || iy >= in_shape.height || ix < 0 || ix >= in_shape.width) {
              std::fill_n(row, wpp, 0u);
            } else {
              std::copy_n(image + (static_cast<size_t>(iy) * in_shape.width + ix) * wpp,
                          wpp, row);
            }
            row += wpp;
          }
        }
        out += row_words;
      }
    }
  }
}

BitpackedMatrix im2col_bitpacked(const BitpackedTensor& input,
                                 const BConvDescriptor& desc) {
  if (input.shape.channels != desc.in_channels) {
    throw ConfigError("im2col: input has " + std::to_string(input.shape.channels) +
                      " channels, descriptor expects " +
                      std::to_string(desc.in_channels));
  }
  const ConvGeometry g = make_geometry(desc, input.shape.height, input.shape.width);
  BitpackedMatrix m;
  m.rows = input.shape.batch * g.out_h * g.out_w;
  m.words_per_row = desc.words_per_row();
  m.data.resize(static_cast<size_t>(m.rows) * m.words_per_row);
  im2col_bitpacked(input.words, input.shape, g, desc.kernel_h, desc.kernel_w,
                   desc.stride_h, desc.stride_w, m.data);
  return m;
}

namespace {

inline uint64_t load64(const uint32_t* p) {
  uint64_t v;
  std::memcpy(&v, p, sizeof(v));
  return v;
}

inline int32_t dot_popcount(const uint32_t* a, const uint32_t* b, int words) {
  int32_t acc = 0;
  int k = 0;
  for (; k + 2 <= words; k += 2) acc += std::popcount(load64(a + k) ^ load64(b + k));
  if (k < words) acc += std::popcount(a[k] ^ b[k]);
  return acc;
}

#ifdef BINCONV_HAVE_AVX512_POPCNT

// 2 rows x 4 columns per step, 16 words per vector; the tail is a masked load.
void bgemm_rows(const uint32_t* lhs, int r0, int r1, const uint32_t* w,
                int cols, int words, int32_t* acc) {
  const int full = words / 16;
  const __mmask16 tail_mask = static_cast<__mmask16>((1u << (words % 16)) - 1u);
  const size_t stride = words;
  auto ld = [&](const uint32_t* p, int v) {
    return v < full ? _mm512_loadu_si512(p + v * 16)
                    : _mm512_maskz_loadu_epi32(tail_mask, p + v * 16);
  };
  const int vecs = full + (tail_mask ? 1 : 0);
  auto pc = [](__m512i x, __m512i y) {
    return _mm512_popcnt_epi64(_mm512_xor_si512(x, y));
  };
  int r = r0;
  for (; r + 2 <= r1; r += 2) {
    const uint32_t* a0 = lhs + r * stride;
    const uint32_t* a1 = a0 + stride;
    int c = 0;
    for (; c + 4 <= cols; c += 4) {
      const uint32_t* b0 = w + c * stride;
      const uint32_t* b1 = b0 + stride;
      const uint32_t* b2 = b1 + stride;
      const uint32_t* b3 = b2 + stride;
      __m512i s00 = _mm512_setzero_si512(), s01 = s00, s02 = s00, s03 = s00;
      __m512i s10 = s00, s11 = s00, s12 = s00, s13 = s00;
      for (int v = 0; v < vecs; ++v) {
        const __m512i x0 = ld(a0, v), x1 = ld(a1, v);
        const __m512i y0 = ld(b0, v), y1 = ld(b1, v), y2 = ld(b2, v), y3 = ld(b3, v);
        s00 = _mm512_add_epi64(s00, pc(x0, y0));
        s01 = _mm512_add_epi64(s01, pc(x0, y1));
        s02 = _mm512_add_epi64(s02, pc(x0, y2));
        s03 = _mm512_add_epi64(s03, pc(x0, y3));
        s10 = _mm512_add_epi64(s10, pc(x1, y0));
        s11 = _mm512_add_epi64(s11, pc(x1, y1));
        s12 = _mm512_add_epi64(s12, pc(x1, y2));
        s13 = _mm512_add_epi64(s13, pc(x1, y3));
      }
      int32_t* o0 = acc + static_cast<size_t>(r) * cols + c;
      int32_t* o1 = o0 + cols;
      o0[0] = static_cast<int32_t>(_mm512_reduce_add_epi64(s00));
      o0[1] = static_cast<int32_t>(_mm512_reduce_add_epi64(s01));
      o0[2] = static_cast<int32_t>(_mm512_reduce_add_epi64(s02));
      o0[3] = static_cast<int32_t>(_mm512_reduce_add_epi64(s03));
      o1[0] = static_cast<int32_t>(_mm512_reduce_add_epi64(s10));
      o1[1] = static_cast<int32_t>(_mm512_reduce_add_epi64(s11));
      o1[2] = static_cast<int32_t>(_mm512_reduce_add_epi64(s12));
      o1[3] = static_cast<int32_t>(_mm512_reduce_add_epi64(s13));
    }
    for (; c < cols; ++c) {
      acc[static_cast<size_t>(r) * cols + c] = dot_popcount(a0, w + c * stride, words);
      acc[static_cast<size_t>(r + 1) * cols + c] = dot_popcount(a1, w + c * stride, words);
    }
  }
  for (; r < r1; ++r) {
    for (int c = 0; c < cols; ++c) {
      acc[static_cast<size_t>(r) * cols + c] =
          dot_popcount(lhs + r * stride, w + c * stride, words);
    }
  }
}

#else

// 4 rows x 4 columns of scalar 64-bit popcounts per step.
void bgemm_rows(const uint32_t* lhs, int r0, int r1, const uint32_t* w,
                int cols, int words, int32_t* acc) {
  const size_t stride = words;
  const int pairs = words / 2;
  const bool odd = words % 2;
  int r = r0;
  for (; r + 4 <= r1; r += 4) {
    const uint32_t* a[4];
    for (int i = 0; i < 4; ++i) a[i] = lhs + (r + i) * stride;
    int c = 0;
    for (; c + 4 <= cols; c += 4) {
      const uint32_t* b[4];
      for (int j = 0; j < 4; ++j) b[j] = w + (c + j) * stride;
      int32_t s[4][4] = {};
      for (int k = 0; k < pairs; ++k) {
        uint64_t x[4], y[4];
        for (int i = 0; i < 4; ++i) x[i] = load64(a[i] + 2 * k);
        for (int j = 0; j < 4; ++j) y[j] = load64(b[j] + 2 * k);
        for (int i = 0; i < 4; ++i) {
          for (int j = 0; j < 4; ++j) s[i][j] += std::popcount(x[i] ^ y[j]);
        }
      }
      if (odd) {
        for (int i = 0; i < 4; ++i) {
          for (int j = 0; j < 4; ++j) {
            s[i][j] += std::popcount(a[i][words - 1] ^ b[j][words - 1]);
          }
        }
      }
      for (int i = 0; i < 4; ++i) {
        std::copy_n(s[i], 4, acc + static_cast<size_t>(r + i) * cols + c);
      }
    }
    for (; c < cols; ++c) {
      for (int i = 0; i < 4; ++i) {
        acc[static_cast<size_t>(r + i) * cols + c] =
            dot_popcount(a[i], w + c * stride, words);
      }
    }
  }
  for (; r < r1; ++r) {
    for (int c = 0; c < cols; ++c) {
      acc[static_cast<size_t>(r) * cols + c] =
          dot_popcount(lhs + r * stride, w + c * stride, words);
    }
  }
}

#endif

}  // namespace

void bgemm(const uint32_t* lhs, int rows, const uint32_t* weights, int cols,
           int words, int32_t* acc, int threads) {
  if (words == 0) {
    std::fill_n(acc, static_cast<size_t>(rows) * cols, 0);
    return;
  }
  parallel_for(0, rows, threads, [&](int64_t lo, int64_t hi) {
    bgemm_rows(lhs, static_cast<int>(lo), static_cast<int>(hi), weights, cols,
               words, acc);
  });
}

AccumulatorMatrix bgemm(const BitpackedMatrix& lhs,
                        const BitpackedMatrix& weights, int threads) {
  if (lhs.words_per_row != weights.words_per_row) {
    throw ConfigError("bgemm: lhs has " + std::to_string(lhs.words_per_row) +
                      " words per row, weights have " +
                      std::to_string(weights.words_per_row));
  }
  AccumulatorMatrix acc;
  acc.rows = lhs.rows;
  acc.cols = weights.rows;
  acc.data.resize(static_cast<size_t>(acc.rows) * acc.cols);
  bgemm(lhs.data.data(), lhs.rows, weights.data.data(), weights.rows,
        lhs.words_per_row, acc.data.data(), threads);
  return acc;
}

void output_transform_float(const int32_t* acc, int row_begin, int row_end,
                            const BConvDescriptor& desc, int out_h, int out_w,
                            const PaddingCorrection* correction, float* out) {
  const int n = desc.dot_length();
  const int cols = desc.out_channels;
  const bool corrected = correction != nullptr && !correction->empty();
  for (int r = row_begin; r < row_end; ++r) {
    const int pos = r % (out_h * out_w);
    const int oy = pos / out_w;
    const int ox = pos % out_w;
    const int32_t* a = acc + static_cast<size_t>(r) * cols;
    float* o = out + static_cast<size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) {
      int64_t dot = accumulator_to_dot(n, a[c]);
      if (corrected) dot -= correction->at(oy, ox, c);
      o[c] = transform_dot(dot, desc.activation, desc.multiplier[c], desc.bias[c]);
    }
  }
}

FloatTensor output_transform_float(const AccumulatorMatrix& acc,
                                   const BConvDescriptor& desc,
                                   const Shape& out_shape,
                                   const PaddingCorrection* correction) {
  if (acc.cols != desc.out_channels || out_shape.channels != desc.out_channels ||
      acc.rows != out_shape.pixels()) {
    throw ConfigError("output transform: accumulator is " +
                      std::to_string(acc.rows) + "x" + std::to_string(acc.cols) +
                      ", output shape " + out_shape.str());
  }
  FloatTensor out(out_shape);
  output_transform_float(acc.data.data(), 0, acc.rows, desc, out_shape.height,
                         out_shape.width, correction, out.data.data());
  return out;
}

DoubledThresholds doubled_thresholds(const ThresholdSet& set) {
  DoubledThresholds d;
  d.limit.reserve(set.channels.size());
  d.mode.reserve(set.channels.size());
  for (const ChannelThreshold& t : set.channels) {
    using Mode = DoubledThresholds::Mode;
    if (t.constant) {
      d.mode.push_back(*t.constant ? Mode::kOne : Mode::kZero);
      d.limit.push_back(0);
    } else {
      d.mode.push_back(t.flip ? Mode::kLess : Mode::kGreater);
      // 2 * tau is integral for thresholds produced by compute_thresholds; a
      // hand-written fractional tau still compares correctly after flooring
      // for '>' and ceiling for '<'.
      d.limit.push_back(t.flip ? static_cast<int64_t>(std::ceil(2.0 * t.tau))
                               : static_cast<int64_t>(std::floor(2.0 * t.tau)));
    }
  }
  return d;
}

void output_transform_bitpacked(const int32_t* acc, int row_begin, int row_end,
                                int out_channels,
                                const DoubledThresholds& thresholds, int out_h,
                                int out_w, const PaddingCorrection* correction,
                                uint32_t* out) {
  using Mode = DoubledThresholds::Mode;
  const int wpp = packed_words(out_channels);
  const bool corrected = correction != nullptr && !correction->empty();
  for (int r = row_begin; r < row_end; ++r) {
    const int pos = r % (out_h * out_w);
    const int oy = pos / out_w;
    const int ox = pos % out_w;
    const int32_t* a = acc + static_cast<size_t>(r) * out_channels;
    uint32_t* o = out + static_cast<size_t>(r) * wpp;
    std::fill_n(o, wpp, 0u);
    for (int c = 0; c < out_channels; ++c) {
      int64_t doubled = 2 * int64_t{a[c]};
      if (corrected) doubled += correction->at(oy, ox, c);
      bool bit = false;
      switch (thresholds.mode[c]) {
        case Mode::kGreater: bit = doubled > thresholds.limit[c]; break;
        case Mode::kLess: bit = doubled < thresholds.limit[c]; break;
        case Mode::kZero: bit = false; break;
        case Mode::kOne: bit = true; break;
      }
      o[c / kWordBits] |= static_cast<uint32_t>(bit) << (c % kWordBits);
    }
  }
}

BitpackedTensor output_transform_bitpacked(const AccumulatorMatrix& acc,
                                           const BConvDescriptor& desc,
                                           const Shape& out_shape,
                                           const PaddingCorrection* correction) {
  if (acc.cols != desc.out_channels || out_shape.channels != desc.out_channels ||
      acc.rows != out_shape.pixels()) {
    throw ConfigError("output transform: accumulator is " +
                      std::to_string(acc.rows) + "x" + std::to_string(acc.cols) +
                      ", output shape " + out_shape.str());
  }
  if (static_cast<int>(desc.thresholds.channels.size()) != desc.out_channels) {
    throw ConfigError("output transform: missing thresholds");
  }
  BitpackedTensor out(out_shape);
  output_transform_bitpacked(acc.data.data(), 0, acc.rows, desc.out_channels,
                             doubled_thresholds(desc.thresholds),
                             out_shape.height, out_shape.width, correction,
                             out.words.data());
  return out;
}

ThresholdFit compute_thresholds(const BConvDescriptor& desc) {
  const int n = desc.dot_length();
  ThresholdFit fit;
  fit.set.channels.resize(desc.out_channels);
  std::vector<uint8_t> bits(2 * static_cast<size_t>(n) + 1);
  for (int c = 0; c < desc.out_channels; ++c) {
    // doubled = 2 * acc_eff = n - dot
    for (int doubled = 0; doubled <= 2 * n; ++doubled) {
      bits[doubled] = sign_bit(transform_dot(n - doubled, desc.activation,
                                             desc.multiplier[c], desc.bias[c]));
    }
    int changes = 0;
    int first_change = -1;
    for (int d = 1; d <= 2 * n; ++d) {
      if (bits[d] != bits[d - 1]) {
        if (changes++ == 0) first_change = d;
      }
    }
    ChannelThreshold& t = fit.set.channels[c];
    if (changes == 0) {
      t.constant = bits[0] != 0;
    } else if (changes == 1) {
      t.flip = bits[0] != 0;
      // flip=false: bits are 0 up to first_change-1, then 1.
      // flip=true: bits are 1 below first_change, then 0.
      t.tau = t.flip ? first_change / 2.0 : (first_change - 1) / 2.0;
    } else {
      fit.non_monotone.push_back(c);
    }
  }
  return fit;
}

PaddingCorrection build_padding_correction(const BitpackedTensor& weights,
                                           const BConvDescriptor& desc,
                                           int in_h, int in_w) {
  PaddingCorrection corr;
  if (desc.padding != PaddingMode::kZeroCorrected) return corr;
  const int kh = desc.kernel_h;
  const int kw = desc.kernel_w;
  if (weights.shape != Shape{desc.out_channels, kh, kw, desc.in_channels}) {
    throw ConfigError("padding correction: weight shape " + weights.shape.str() +
                      " does not match descriptor");
  }
  const ConvGeometry g = make_geometry(desc, in_h, in_w);
  const PositionClasses pc =
      position_classes(g, kh, kw, desc.stride_h, desc.stride_w);

  // Sum of +-1 weights of every (out channel, tap).
  const int wpp = weights.words_per_pixel();
  std::vector<int32_t> tap_sum(static_cast<size_t>(desc.out_channels) * kh * kw);
  for (size_t t = 0; t < tap_sum.size(); ++t) {
    int ones = 0;
    for (int k = 0; k < wpp; ++k) ones += std::popcount(weights.words[t * wpp + k]);
    tap_sum[t] = desc.in_channels - 2 * ones;
  }

  corr.row_class = pc.row_class;
  corr.col_class = pc.col_class;
  corr.num_row_classes = static_cast<int>(pc.row_cut.size());
  corr.num_col_classes = static_cast<int>(pc.col_cut.size());
  corr.out_channels = desc.out_channels;
  corr.values.assign(static_cast<size_t>(corr.num_row_classes) *
                         corr.num_col_classes * desc.out_channels, 0);
  for (int rc = 0; rc < corr.num_row_classes; ++rc) {
    const auto [top, bottom] = pc.row_cut[rc];
    for (int cc = 0; cc < corr.num_col_classes; ++cc) {
      const auto [left, right] = pc.col_cut[cc];
      int32_t* v = corr.values.data() +
                   (static_cast<size_t>(rc) * corr.num_col_classes + cc) *
                       desc.out_channels;
      for (int o = 0; o < desc.out_channels; ++o) {
        int32_t sum = 0;
        for (int ky = 0; ky < kh; ++ky) {
          const bool row_out = ky < top || ky >= kh - bottom;
          for (int kx = 0; kx < kw; ++kx) {
            if (row_out || kx < left || kx >= kw - right) {
              sum += tap_sum[(static_cast<size_t>(o) * kh + ky) * kw + kx];
            }
          }
        }
        v[o] = sum;
      }
    }
  }
  return corr;
}

namespace {

struct Prepared {
  ConvGeometry geom;
  Shape out_shape;
  AccumulatorMatrix acc;
};

Prepared run_accumulation(const BitpackedTensor& input,
                          const BitpackedTensor& weights,
                          const BConvDescriptor& desc, int threads) {
  desc.check();
  if (weights.shape != Shape{desc.out_channels, desc.kernel_h, desc.kernel_w,
                             desc.in_channels}) {
    throw ConfigError("bconv: weight shape " + weights.shape.str() +
                      " does not match descriptor");
  }
  Prepared p;
  p.geom = make_geometry(desc, input.shape.height, input.shape.width);
  p.out_shape = {input.shape.batch, p.geom.out_h, p.geom.out_w, desc.out_channels};
  const BitpackedMatrix lhs = im2col_bitpacked(input, desc);
  p.acc = bgemm(lhs, weight_matrix(weights), threads);
  return p;
}

void check_correction(const BConvDescriptor& desc,
                      const PaddingCorrection* correction) {
  if (desc.padding == PaddingMode::kZeroCorrected &&
      (correction == nullptr || correction->empty())) {
    throw ConfigError("bconv: zero-corrected padding requires a correction");
  }
}

}  // namespace

FloatTensor bconv2d_float(const BitpackedTensor& input,
                          const BitpackedTensor& weights,
                          const BConvDescriptor& desc,
                          const PaddingCorrection* correction, int threads) {
  check_correction(desc, correction);
  const Prepared p = run_accumulation(input, weights, desc, threads);
  return output_transform_float(p.acc, desc, p.out_shape, correction);
}

BitpackedTensor bconv2d_bitpacked(const BitpackedTensor& input,
                                  const BitpackedTensor& weights,
                                  const BConvDescriptor& desc,
                                  const PaddingCorrection* correction,
                                  int threads) {
  check_correction(desc, correction);
  const Prepared p = run_accumulation(input, weights, desc, threads);
  return output_transform_bitpacked(p.acc, desc, p.out_shape, correction);
}

}  // namespace binconv::kernels
