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

#ifndef BINCONV_CORE_ERROR_H_
#define BINCONV_CORE_ERROR_H_

#include <stdexcept>
#include <string>

namespace binconv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid operator configuration: mismatched shapes, bad geometry.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or invalid graph. `node()` is empty when the problem is not tied
// to a single node.
class GraphError : public Error {
 public:
  GraphError(std::string node, const std::string& reason)
      : Error(node.empty() ? reason : "node '" + node + "': " + reason),
        node_(std::move(node)) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

class ConversionError : public Error {
 public:
  ConversionError(std::string pass, std::string node, const std::string& reason)
      : Error("pass " + pass + (node.empty() ? "" : ", node '" + node + "'") +
              ": " + reason),
        pass_(std::move(pass)),
        node_(std::move(node)) {}
  const std::string& pass() const { return pass_; }
  const std::string& node() const { return node_; }

 private:
  std::string pass_;
  std::string node_;
};

// Model file decoding failure; `offset()` is the byte position where decoding
// stopped.
class LoadError : public Error {
 public:
  LoadError(size_t offset, const std::string& reason)
      : Error(reason + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}
  size_t offset() const { return offset_; }

 private:
  size_t offset_;
};

}  // namespace binconv

#endif  // BINCONV_CORE_ERROR_H_
