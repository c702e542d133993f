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

#include "binconv/core/tensor.h"

#include "binconv/core/error.h"

namespace binconv {

std::string Shape::str() const {
  return "[" + std::to_string(batch) + "," + std::to_string(height) + "," +
         std::to_string(width) + "," + std::to_string(channels) + "]";
}

FloatTensor::FloatTensor(const Shape& s, std::vector<float> values)
    : shape(s), data(std::move(values)) {
  if (static_cast<int64_t>(data.size()) != shape.elements()) {
    throw ConfigError("float tensor data length " + std::to_string(data.size()) +
                      " does not match shape " + shape.str());
  }
}

}  // namespace binconv
