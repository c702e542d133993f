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

#ifndef BINCONV_CONVERTER_CONVERT_H_
#define BINCONV_CONVERTER_CONVERT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "binconv/converter/passes.h"
#include "binconv/graph/graph.h"

namespace binconv::converter {

struct VerifyOptions {
  int probes = 16;
  uint64_t seed = 0x5eed;
  double tolerance = 1e-4;  // absolute, float outputs
  // Probe inputs whose reference run puts a pre-sign value closer than this
  // to zero are redrawn; such ties are decided by rounding, not by the pass.
  double sign_margin = 1e-9;
  int threads = 1;
};

struct ConvertOptions {
  bool verify = false;
  VerifyOptions verify_options;
  // Test hook: corrupt the graph right after the named pass.
  std::string inject_fault;
};

struct ConversionResult {
  graph::Graph graph;
  std::vector<uint8_t> model;
  std::vector<PassReport> reports;
};

struct Equivalence {
  bool equivalent = true;
  double max_abs_error = 0.0;
  int probes = 0;
  std::string detail;  // first mismatch
};

// Runs both graphs through the reference oracle on random inputs drawn for
// `before`'s input shapes and compares their outputs.
Equivalence check_equivalence(const graph::Graph& before, const graph::Graph& after,
                              const VerifyOptions& options);

// Runs the fixed pipeline on a copy of `g`. With verification, a pass whose
// output is not equivalent aborts with ConversionError naming the pass.
ConversionResult convert(const graph::Graph& g, const ConvertOptions& options = {});

}  // namespace binconv::converter

#endif  // BINCONV_CONVERTER_CONVERT_H_
