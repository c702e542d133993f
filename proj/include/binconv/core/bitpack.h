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

#ifndef BINCONV_CORE_BITPACK_H_
#define BINCONV_CORE_BITPACK_H_

#include <cstdint>
#include <span>

#include "binconv/core/tensor.h"

namespace binconv {

// Binarization convention shared by every module: negative values map to
// bit 1 (-1.0); everything else, including -0.0, maps to bit 0 (+1.0).
inline bool sign_bit(float x) { return x < 0.0f; }

// Packs `pixels` rows of `channels` floats into `pixels * packed_words(channels)`
// words. Padding bits are written as zero.
void quantize(std::span<const float> input, int64_t pixels, int channels,
              std::span<uint32_t> output);
BitpackedTensor quantize(const FloatTensor& input);

void dequantize(std::span<const uint32_t> input, int64_t pixels, int channels,
                std::span<float> output);
FloatTensor dequantize(const BitpackedTensor& input);

// Appends +1.0 channels up to the next multiple of `multiple`.
FloatTensor channel_pad(const FloatTensor& input, int multiple = kWordBits);

}  // namespace binconv

#endif  // BINCONV_CORE_BITPACK_H_
