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

#ifndef BINCONV_RUNTIME_ORACLE_H_
#define BINCONV_RUNTIME_ORACLE_H_

#include <limits>
#include <map>
#include <vector>

#include "binconv/core/tensor.h"
#include "binconv/graph/graph.h"

namespace binconv::runtime {

// Reference evaluation of a graph in plain floating point. Binarization is
// emulated with sign() on real values and bitpacked tensors are carried as
// +-1 reals, so the same evaluator accepts training graphs and converted
// models. Arithmetic is done in double with naive loops.
struct OracleValue {
  Shape shape;
  std::vector<double> data;
};

struct OracleTrace {
  // Smallest non-zero magnitude that went through a sign decision. Values
  // this close to zero can flip under float reassociation.
  double min_sign_margin = std::numeric_limits<double>::infinity();
};

// Evaluates every tensor. `inputs` follow graph.inputs order.
std::map<graph::TensorId, OracleValue> evaluate_oracle(
    const graph::Graph& g, const std::vector<FloatTensor>& inputs,
    OracleTrace* trace = nullptr);

// Graph outputs only, rounded to float; bitpacked outputs come back as +-1.
std::vector<FloatTensor> run_oracle(const graph::Graph& g,
                                    const std::vector<FloatTensor>& inputs,
                                    OracleTrace* trace = nullptr);

}  // namespace binconv::runtime

#endif  // BINCONV_RUNTIME_ORACLE_H_
