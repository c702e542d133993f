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

#ifndef BINCONV_GRAPH_SERIALIZE_H_
#define BINCONV_GRAPH_SERIALIZE_H_

#include <string>
#include <string_view>

#include "binconv/graph/graph.h"

namespace binconv::graph {

inline constexpr int kGraphSchemaVersion = 1;

struct SerializeOptions {
  // When false, bitpacked constant payloads are left out of the text; the
  // model file carries them in its weight section instead.
  bool inline_bitpacked = true;
};

// Deterministic text form: object keys sorted, tensors ordered by id, nodes in
// graph order.
std::string serialize(const Graph& g, const SerializeOptions& options = {});

// Schema-level decoding only (keys, types, payload lengths). Throws GraphError.
Graph decode_graph(std::string_view text);

// decode_graph followed by topological ordering and validation; any
// diagnostic is raised as GraphError.
Graph parse_training_graph(std::string_view text);

}  // namespace binconv::graph

#endif  // BINCONV_GRAPH_SERIALIZE_H_
