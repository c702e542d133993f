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

#include "binconv/core/bitpack.h"

#include <algorithm>

#include "binconv/core/error.h"

namespace binconv {

void quantize(std::span<const float> input, int64_t pixels, int channels,
              std::span<uint32_t> output) {
  const int wpp = packed_words(channels);
  if (static_cast<int64_t>(input.size()) < pixels * channels ||
      static_cast<int64_t>(output.size()) < pixels * wpp) {
    throw ConfigError("quantize: buffer too small");
  }
  for (int64_t p = 0; p < pixels; ++p) {
    const float* in = input.data() + p * channels;
    uint32_t* out = output.data() + p * wpp;
    for (int w = 0; w < wpp; ++w) {
      const int base = w * kWordBits;
      const int count = std::min(kWordBits, channels - base);
      uint32_t word = 0;
      for (int b = 0; b < count; ++b) {
        word |= static_cast<uint32_t>(sign_bit(in[base + b])) << b;
      }
      out[w] = word;
    }
  }
}

BitpackedTensor quantize(const FloatTensor& input) {
  if (input.shape.channels < 1) throw ConfigError("quantize: no channels");
  BitpackedTensor out(input.shape);
  quantize(input.data, input.shape.pixels(), input.shape.channels, out.words);
  return out;
}

void dequantize(std::span<const uint32_t> input, int64_t pixels, int channels,
                std::span<float> output) {
  const int wpp = packed_words(channels);
  for (int64_t p = 0; p < pixels; ++p) {
    const uint32_t* in = input.data() + p * wpp;
    float* out = output.data() + p * channels;
    for (int c = 0; c < channels; ++c) {
      out[c] = ((in[c / kWordBits] >> (c % kWordBits)) & 1u) ? -1.0f : 1.0f;
    }
  }
}

FloatTensor dequantize(const BitpackedTensor& input) {
  FloatTensor out(input.shape);
  dequantize(input.words, input.shape.pixels(), input.shape.channels, out.data);
  return out;
}

FloatTensor channel_pad(const FloatTensor& input, int multiple) {
  if (multiple != kWordBits) {
    throw ConfigError("channel_pad: only multiples of 32 are supported");
  }
  const int c_in = input.shape.channels;
  const int c_out = packed_words(c_in) * kWordBits;
  if (c_out == c_in) return input;
  Shape s = input.shape;
  s.channels = c_out;
  FloatTensor out(s);
  std::fill(out.data.begin(), out.data.end(), 1.0f);
  for (int64_t p = 0; p < input.shape.pixels(); ++p) {
    std::copy_n(input.data.begin() + p * c_in, c_in, out.data.begin() + p * c_out);
  }
  return out;
}

}  // namespace binconv
