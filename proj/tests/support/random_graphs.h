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

#ifndef BINCONV_TESTS_SUPPORT_RANDOM_GRAPHS_H_
#define BINCONV_TESTS_SUPPORT_RANDOM_GRAPHS_H_

#include <vector>

#include "binconv/graph/graph.h"
#include "support/oracles.h"

namespace binconv::testing {

// Small factory graph of a random kind with random parameters.
graph::Graph random_factory_graph(Rng& rng);

// Random chain of training-graph blocks: binary conv blocks (every padding
// mode, optional ReLU / BatchNorm / output Sign), float conv blocks, pooling,
// residual Adds and an optional pooled dense head. Every op kind that the
// converter can produce appears in some draw.
graph::Graph random_training_graph(Rng& rng);

// Normal inputs for `g`, redrawn until every sign decision the reference
// evaluator makes is at least `margin` away from zero (up to `attempts`).
// Returns false when no draw qualified.
bool draw_inputs(const graph::Graph& g, Rng& rng, double margin, int attempts,
                 std::vector<FloatTensor>* inputs);

struct Comparison {
  double max_abs_error = 0.0;
  bool shapes_match = true;
};
Comparison compare(const std::vector<FloatTensor>& a, const std::vector<FloatTensor>& b);

}  // namespace binconv::testing

#endif  // BINCONV_TESTS_SUPPORT_RANDOM_GRAPHS_H_
