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

#include <doctest.h>

#include <cmath>
#include <string>

#include "binconv/core/base64.h"
#include "binconv/core/bitpack.h"
#include "binconv/core/error.h"
#include "support/oracles.h"

namespace binconv {
namespace {

using testing::Rng;

TEST_CASE("quantize follows the sign convention and clears padding bits") {
  const BitpackedTensor q = quantize(FloatTensor(Shape{1, 1, 1, 4}, {0.5f, -1.2f, 0.0f, -0.0f}));
  REQUIRE(q.words.size() == 1);
  CHECK(q.words[0] == 0x2u);
  CHECK(q.shape.channels == 4);
}

TEST_CASE("all-positive input packs to a zero word") {
  const BitpackedTensor q = quantize(FloatTensor(Shape{1, 1, 1, 32}, std::vector<float>(32, 3.0f)));
  REQUIRE(q.words.size() == 1);
  CHECK(q.words[0] == 0u);
}

TEST_CASE("quantize matches a scalar sign loop") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Shape s{1, 10, 10, 96};
    const FloatTensor x = testing::random_normal(rng, s);
    const BitpackedTensor q = quantize(x);
    CHECK(q.words.size() == static_cast<size_t>(s.pixels() * 3));
    CHECK(testing::unpack_bits(q) == testing::sign_bits(x));
  }
}

TEST_CASE("padding bits stay zero for channel counts off the word grid") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int c = testing::uniform_int(rng, 1, 100);
    const Shape s{testing::uniform_int(rng, 1, 2), testing::uniform_int(rng, 1, 4),
                  testing::uniform_int(rng, 1, 4), c};
    const BitpackedTensor q = quantize(testing::random_normal(rng, s));
    const int wpp = packed_words(c);
    REQUIRE(q.words.size() == static_cast<size_t>(s.pixels() * wpp));
    if (c % 32 == 0) continue;
    const uint32_t valid = (1u << (c % 32)) - 1u;
    for (int64_t p = 0; p < s.pixels(); ++p) {
      CHECK((q.words[p * wpp + wpp - 1] & ~valid) == 0u);
    }
  }
}

TEST_CASE("dequantize expands words to +-1") {
  BitpackedTensor t(Shape{1, 1, 1, 32});
  t.words[0] = 0xFFFFFFFFu;
  const FloatTensor d = dequantize(t);
  REQUIRE(d.data.size() == 32);
  for (float v : d.data) CHECK(v == -1.0f);
}

TEST_CASE("quantize and dequantize round trips") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Shape s{1, 3, 3, testing::uniform_int(rng, 1, 70)};
    const FloatTensor x = testing::random_normal(rng, s);
    const BitpackedTensor q = quantize(x);
    CHECK(quantize(dequantize(q)).words == q.words);
    const FloatTensor d = dequantize(q);
    for (size_t i = 0; i < x.data.size(); ++i) {
      CHECK(d.data[i] == testing::sign_pm1(x.data[i]));
    }
    CHECK(quantize(x).words == q.words);
  }
}

TEST_CASE("channel_pad appends +1 channels") {
  const FloatTensor x(Shape{1, 1, 1, 5}, {-1, -2, -3, -4, -5});
  const FloatTensor p = channel_pad(x);
  CHECK(p.shape == Shape{1, 1, 1, 32});
  for (int c = 0; c < 5; ++c) CHECK(p.data[c] == x.data[c]);
  for (int c = 5; c < 32; ++c) CHECK(p.data[c] == 1.0f);

  const FloatTensor aligned(Shape{1, 1, 2, 32}, std::vector<float>(64, -1.0f));
  CHECK(channel_pad(aligned).data == aligned.data);

  Rng rng(14);
  const FloatTensor y = testing::random_normal(rng, Shape{1, 2, 2, 40});
  const FloatTensor py = channel_pad(y);
  CHECK(py.shape == Shape{1, 2, 2, 64});
  const BitpackedTensor q = quantize(py);
  for (int64_t p = 0; p < 4; ++p) CHECK((q.words[p * 2 + 1] >> 8) == 0u);
}

TEST_CASE("base64 round trips and rejects garbage") {
  const std::vector<uint8_t> bytes = {0, 1, 2, 250, 251, 252, 253};
  const std::string text = base64_encode(bytes);
  CHECK(text == "AAEC+vv8/Q==");
  CHECK(base64_decode(text) == bytes);
  CHECK(base64_decode(base64_encode({})).empty());
  CHECK_THROWS_AS(base64_decode("@@@"), Error);
}

}  // namespace
}  // namespace binconv
