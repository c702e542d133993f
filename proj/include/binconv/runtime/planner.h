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

#ifndef BINCONV_RUNTIME_PLANNER_H_
#define BINCONV_RUNTIME_PLANNER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace binconv::runtime {

// A tensor that needs arena space from op `first` through op `last`
// (inclusive).
struct BufferRequest {
  int64_t bytes = 0;
  int first = 0;
  int last = 0;
};

struct BufferPlacement {
  int64_t offset = 0;
  int64_t bytes = 0;
  int first = 0;
  int last = 0;
};

struct MemoryPlan {
  std::vector<BufferPlacement> buffers;  // same order as the requests
  int64_t arena_bytes = 0;
};

inline constexpr int64_t kArenaAlignment = 64;

// Greedy best-fit by size: largest requests are placed first, each into the
// tightest gap left by already placed buffers whose lifetimes intersect.
MemoryPlan plan_memory(const std::vector<BufferRequest>& requests,
                       int64_t alignment = kArenaAlignment);

// Total bytes without any reuse (every buffer aligned and laid out in turn).
int64_t unshared_bytes(const std::vector<BufferRequest>& requests,
                       int64_t alignment = kArenaAlignment);

// Describes the first pair of simultaneously live buffers that overlap.
std::optional<std::string> find_overlap(const MemoryPlan& plan);

}  // namespace binconv::runtime

#endif  // BINCONV_RUNTIME_PLANNER_H_
