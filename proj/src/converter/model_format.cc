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

#include "binconv/converter/model_format.h"

#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "binconv/core/error.h"
#include "binconv/graph/serialize.h"
#include "binconv/graph/validate.h"

namespace binconv::converter {

using graph::DType;
using graph::Graph;
using graph::TensorId;

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}

  size_t offset() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }

  std::span<const uint8_t> take(size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw LoadError(pos_, std::string("truncated ") + what + ": need " +
                                std::to_string(n) + " bytes, " +
                                std::to_string(bytes_.size() - pos_) + " left");
    }
  }

  std::span<const uint8_t> bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> write_model(const Graph& g) {
  std::vector<uint8_t> out(std::begin(kModelMagic), std::end(kModelMagic));
  put_u32(out, kModelVersion);
  const std::string text = graph::serialize(g, {.inline_bitpacked = false});
  put_u32(out, static_cast<uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& [id, t] : g.tensors) {
    if (!t.is_constant() || t.dtype != DType::kBitpacked) continue;
    const auto& words = t.words();
    put_u32(out, id);
    put_u32(out, static_cast<uint32_t>(words.size() * 4));
    for (uint32_t w : words) put_u32(out, w);
  }
  return out;
}

Graph read_model(std::span<const uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kModelMagic, 4) != 0) throw LoadError(0, "bad magic");
  const uint32_t version = r.u32("version");
  if (version != kModelVersion) {
    throw LoadError(4, "unsupported model version " + std::to_string(version));
  }
  const uint32_t length = r.u32("graph length");
  const size_t graph_at = r.offset();
  auto text = r.take(length, "graph section");
  Graph g;
  try {
    g = graph::decode_graph(
        std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
  } catch (const GraphError& e) {
    throw LoadError(graph_at, std::string("invalid graph: ") + e.what());
  }
  std::set<TensorId> seen;
  while (!r.done()) {
    const size_t blob_at = r.offset();
    const TensorId id = r.u32("blob tensor id");
    const uint32_t size = r.u32("blob length");
    auto payload = r.take(size, "weight blob");
    if (!g.has_tensor(id)) {
      throw LoadError(blob_at, "weight blob for unknown tensor " + std::to_string(id));
    }
    graph::TensorDef& t = g.tensor(id);
    if (t.dtype != DType::kBitpacked || t.is_constant() || !seen.insert(id).second) {
      throw LoadError(blob_at, "unexpected weight blob for tensor " + std::to_string(id));
    }
    if (static_cast<int64_t>(size) != int64_t{4} * t.storage_words()) {
      throw LoadError(blob_at, "weight blob for tensor " + std::to_string(id) + " has " +
                                   std::to_string(size) + " bytes, shape needs " +
                                   std::to_string(4 * t.storage_words()));
    }
    std::vector<uint32_t> words(size / 4);
    for (size_t i = 0; i < words.size(); ++i) {
      uint32_t v = 0;
      for (int b = 0; b < 4; ++b) v |= uint32_t{payload[4 * i + b]} << (8 * b);
      words[i] = v;
    }
    t.data = std::move(words);
  }
  try {
    graph::check_graph(g);
  } catch (const GraphError& e) {
    throw LoadError(graph_at, std::string("invalid graph: ") + e.what());
  }
  return g;
}

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace binconv::converter
