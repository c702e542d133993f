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

#ifndef BINCONV_RUNTIME_INTERPRETER_H_
#define BINCONV_RUNTIME_INTERPRETER_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "binconv/core/tensor.h"
#include "binconv/graph/graph.h"
#include "binconv/runtime/planner.h"

namespace binconv::runtime {

// Wall time of one op in one run. BConv2D also reports its two phases:
// im2col plus the XOR/popcount loop, and the output transformation.
struct OpTiming {
  double total_us = 0.0;
  double accumulate_us = 0.0;
  double transform_us = 0.0;
};

struct OpInfo {
  std::string id;
  graph::OpKind op;
  int64_t macs_binary = 0;
  int64_t macs_float = 0;
  int64_t bytes_read = 0;     // activation bytes, constants excluded
  int64_t bytes_written = 0;
};

class ExecutionPlan {
 public:
  // Takes a validated graph in runtime form (no Sign, no unlegalized zero
  // padding, bitpacked BConv2D weights). Throws GraphError otherwise.
  static ExecutionPlan build(graph::Graph g);

  ExecutionPlan(ExecutionPlan&&) noexcept;
  ExecutionPlan& operator=(ExecutionPlan&&) noexcept;
  ~ExecutionPlan();

  const graph::Graph& graph() const;
  const MemoryPlan& memory() const;
  // Buffer index of a tensor, or -1 for constants.
  int buffer_of(graph::TensorId id) const;
  int64_t arena_bytes() const;
  // Arena size if no buffer were shared.
  int64_t unshared_bytes() const;
  const std::vector<OpInfo>& ops() const;

  // Inputs follow graph().inputs; outputs follow graph().outputs, with
  // bitpacked outputs expanded to +-1 floats. `timings`, when given, receives
  // one entry per op. Safe to call concurrently.
  std::vector<FloatTensor> execute(const std::vector<FloatTensor>& inputs, int threads = 1,
                                   std::vector<OpTiming>* timings = nullptr) const;

 private:
  struct Impl;
  explicit ExecutionPlan(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

// Parses an "LCE1" model file and builds its plan.
ExecutionPlan load_model(std::span<const uint8_t> bytes);

}  // namespace binconv::runtime

#endif  // BINCONV_RUNTIME_INTERPRETER_H_
