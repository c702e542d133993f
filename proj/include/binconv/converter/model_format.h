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

#ifndef BINCONV_CONVERTER_MODEL_FORMAT_H_
#define BINCONV_CONVERTER_MODEL_FORMAT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "binconv/graph/graph.h"

namespace binconv::converter {

// Model file layout, all integers little-endian:
//   "LCE1" | u32 version | u32 graph length | graph text |
//   repeated { u32 tensor id | u32 byte length | packed words }
// The graph text is the training-graph schema restricted to runtime ops, with
// bitpacked constant payloads moved into the weight section.
inline constexpr char kModelMagic[4] = {'L', 'C', 'E', '1'};
inline constexpr uint32_t kModelVersion = 1;

std::vector<uint8_t> write_model(const graph::Graph& g);

// Throws LoadError with the byte offset of the problem; graph-level problems
// surface as GraphError.
graph::Graph read_model(std::span<const uint8_t> bytes);

std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const uint8_t> bytes);

}  // namespace binconv::converter

#endif  // BINCONV_CONVERTER_MODEL_FORMAT_H_
