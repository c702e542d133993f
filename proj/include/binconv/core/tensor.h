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

#ifndef BINCONV_CORE_TENSOR_H_
#define BINCONV_CORE_TENSOR_H_

#include <cstdint>
#include <string>
#include <vector>

namespace binconv {

inline constexpr int kWordBits = 32;

constexpr int packed_words(int channels) {
  return (channels + kWordBits - 1) / kWordBits;
}

// NHWC extents in elements.
struct Shape {
  int batch = 1;
  int height = 1;
  int width = 1;
  int channels = 1;

  int64_t pixels() const { return int64_t{batch} * height * width; }
  int64_t elements() const { return pixels() * channels; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

struct FloatTensor {
  Shape shape;
  std::vector<float> data;

  FloatTensor() = default;
  explicit FloatTensor(const Shape& s) : shape(s), data(s.elements(), 0.0f) {}
  FloatTensor(const Shape& s, std::vector<float> values);

  float& at(int n, int h, int w, int c) { return data[index(n, h, w, c)]; }
  float at(int n, int h, int w, int c) const { return data[index(n, h, w, c)]; }

 private:
  size_t index(int n, int h, int w, int c) const {
    return ((static_cast<size_t>(n) * shape.height + h) * shape.width + w) *
               shape.channels + c;
  }
};

// Sign-bit tensor, NHWC with channels packed 32 per word (LSB first). A zero
// bit is +1.0 and a set bit is -1.0. `shape.channels` is the valid channel
// count; bits at channel positions >= shape.channels are always zero.
struct BitpackedTensor {
  Shape shape;
  std::vector<uint32_t> words;

  BitpackedTensor() = default;
  explicit BitpackedTensor(const Shape& s)
      : shape(s), words(s.pixels() * packed_words(s.channels), 0u) {}

  int words_per_pixel() const { return packed_words(shape.channels); }
  int valid_channels() const { return shape.channels; }

  bool bit(int n, int h, int w, int c) const {
    return (words[word_index(n, h, w, c)] >> (c % kWordBits)) & 1u;
  }
  void set_bit(int n, int h, int w, int c, bool value) {
    uint32_t& word = words[word_index(n, h, w, c)];
    const uint32_t mask = 1u << (c % kWordBits);
    word = value ? (word | mask) : (word & ~mask);
  }

 private:
  size_t word_index(int n, int h, int w, int c) const {
    return ((static_cast<size_t>(n) * shape.height + h) * shape.width + w) *
               words_per_pixel() + c / kWordBits;
  }
};

}  // namespace binconv

#endif  // BINCONV_CORE_TENSOR_H_
