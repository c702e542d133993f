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

#ifndef BINCONV_CONVERTER_PASSES_H_
#define BINCONV_CONVERTER_PASSES_H_

#include <optional>
#include <string>
#include <vector>

#include "binconv/graph/graph.h"

namespace binconv::converter {

struct PassReport {
  std::string pass;
  int nodes_removed = 0;
  int nodes_added = 0;
  int nodes_modified = 0;
  std::vector<std::string> skipped;  // "node: reason" for declined rewrites
  // Set when verification ran.
  std::optional<bool> equivalent;
  double max_abs_error = 0.0;
  int probes = 0;
};

// Each pass rewrites the graph in place and leaves it topologically sorted
// and validated. Errors are raised as ConversionError.

// Sign -> Quantize; Conv2D over a Sign output with binary-flagged weights ->
// BConv2D. Float readers of a Sign output get a Dequantize.
PassReport pass_binarize(graph::Graph& g);
// Folds BatchNorm (and an intermediate ReLU) into the preceding BConv2D, and
// BatchNorm into a preceding float Conv2D.
PassReport pass_fold_batchnorm(graph::Graph& g);
// MaxPool2D -> Quantize becomes Quantize -> BMaxPool2D.
PassReport pass_reorder_maxpool(graph::Graph& g);
// BConv2D -> Quantize becomes a BConv2D with bitpacked output and thresholds.
PassReport pass_fuse_binary_chain(graph::Graph& g);
// Zero-padded BConv2D gains a correction tensor.
PassReport pass_legalize_padding(graph::Graph& g);
// Float +-1 BConv2D weights become bitpacked constants.
PassReport pass_pack_weights(graph::Graph& g);

struct Pass {
  const char* name;
  PassReport (*run)(graph::Graph&);
};

// The fixed pipeline, in order.
const std::vector<Pass>& pipeline();

}  // namespace binconv::converter

#endif  // BINCONV_CONVERTER_PASSES_H_
