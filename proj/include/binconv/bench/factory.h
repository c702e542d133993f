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

#ifndef BINCONV_BENCH_FACTORY_H_
#define BINCONV_BENCH_FACTORY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "binconv/graph/graph.h"

namespace binconv::bench {

// Training graphs with random weights. Binary convolutions are emitted the
// way a training framework records them: Sign on the input and a Conv2D with
// binary-flagged +-1 float weights. BatchNorm statistics are scaled so that
// activations stay O(1).

struct QuickNetOptions {
  std::vector<int> layers = {4, 4, 4, 4};       // N: residual layers per section
  std::vector<int> filters = {32, 64, 256, 512};  // k: filters per section
  int input_size = 224;
  int input_channels = 3;
  int stem_filters = 16;
  int classes = 1000;
};

// Stem: two strided 3x3 float convs with BatchNorm and ReLU (input / 4).
// Section i: N_i layers of x + BN(ReLU(BConv3x3(Sign(x)))) with one padding.
// Transition: 3x3/2 max pooling, then a 1x1 float conv to k_{i+1} and
// BatchNorm. Head: global average pooling and a dense layer.
// Throws ConfigError on bad lengths or sizes.
graph::Graph quicknet_like(const QuickNetOptions& options, uint64_t seed);

enum class ShortcutVariant { kA, kB, kC };

// "A", "B" or "C"; throws ConfigError otherwise.
ShortcutVariant shortcut_variant_from_string(const std::string& name);

struct ShortcutStudyOptions {
  int channels = 64;
  int spatial = 28;
  int regular_blocks = 2;
};

// `regular_blocks` binary blocks at `channels`, then one downsampling binary
// block (stride 2, channels doubled). A: shortcuts everywhere, the
// downsampling shortcut being a strided 1x1 float conv plus BatchNorm.
// B: shortcuts in the regular blocks only. C: no shortcuts.
graph::Graph shortcut_study(ShortcutVariant variant, const ShortcutStudyOptions& options,
                            uint64_t seed);

enum class Precision { kBinary, kFloat };

std::string to_string(Precision p);
Precision precision_from_string(const std::string& name);

struct SingleConvOptions {
  int batch = 1;
  int height = 16;
  int width = 16;
  int in_channels = 32;
  int out_channels = 32;
  int kernel = 3;
  int stride = 1;
  // "valid", "one" or "zero".
  std::string padding = "one";
  Precision precision = Precision::kBinary;
  bool relu = false;
  bool batch_norm = false;
  // Trailing Sign on the output.
  bool binary_output = false;
  // 3x3/1 same max pooling in front of the input Sign.
  bool maxpool_before = false;
};

graph::Graph single_conv(const SingleConvOptions& options, uint64_t seed);

}  // namespace binconv::bench

#endif  // BINCONV_BENCH_FACTORY_H_
