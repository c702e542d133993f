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

#ifndef BINCONV_GRAPH_VALIDATE_H_
#define BINCONV_GRAPH_VALIDATE_H_

#include <string>
#include <vector>

#include "binconv/graph/graph.h"

namespace binconv::graph {

struct Diagnostic {
  std::string node;  // empty for graph-level problems
  std::string message;

  std::string str() const {
    return node.empty() ? message : "node '" + node + "': " + message;
  }
};

// Reorders nodes into a topological order, keeping the existing relative order
// where possible. Throws GraphError naming the nodes on a cycle.
void sort_topologically(Graph& g);

// Checks types, shapes and attributes of a topologically ordered graph and
// writes inferred shapes into every activation tensor. Empty result means the
// graph is valid.
std::vector<Diagnostic> validate(Graph& g);

// sort_topologically + validate, throwing the first diagnostic.
void check_graph(Graph& g);

}  // namespace binconv::graph

#endif  // BINCONV_GRAPH_VALIDATE_H_
