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

#include "binconv/runtime/planner.h"

#include <algorithm>
#include <limits>
#include <numeric>

namespace binconv::runtime {

namespace {

int64_t align_up(int64_t v, int64_t alignment) {
  return (v + alignment - 1) / alignment * alignment;
}

bool live_together(const BufferPlacement& a, const BufferPlacement& b) {
  return a.first <= b.last && b.first <= a.last;
}

}  // namespace

MemoryPlan plan_memory(const std::vector<BufferRequest>& requests, int64_t alignment) {
  MemoryPlan plan;
  plan.buffers.resize(requests.size());
  std::vector<size_t> order(requests.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (requests[a].bytes != requests[b].bytes) return requests[a].bytes > requests[b].bytes;
    return requests[a].first < requests[b].first;
  });

  std::vector<size_t> placed;
  for (size_t idx : order) {
    const BufferRequest& req = requests[idx];
    BufferPlacement& slot = plan.buffers[idx];
    slot.bytes = req.bytes;
    slot.first = req.first;
    slot.last = req.last;
    const int64_t size = align_up(std::max<int64_t>(req.bytes, 1), alignment);

    std::vector<const BufferPlacement*> live;
    for (size_t p : placed) {
      if (live_together(plan.buffers[p], slot)) live.push_back(&plan.buffers[p]);
    }
    std::sort(live.begin(), live.end(),
              [](const auto* a, const auto* b) { return a->offset < b->offset; });

    int64_t best = -1;
    int64_t best_gap = std::numeric_limits<int64_t>::max();
    int64_t cursor = 0;
    for (const BufferPlacement* b : live) {
      const int64_t gap = b->offset - cursor;
      if (gap >= size && gap < best_gap) {
        best = cursor;
        best_gap = gap;
      }
      cursor = std::max(cursor, align_up(b->offset + std::max<int64_t>(b->bytes, 1), alignment));
    }
    slot.offset = best >= 0 ? best : cursor;
    plan.arena_bytes = std::max(plan.arena_bytes, slot.offset + size);
    placed.push_back(idx);
  }
  return plan;
}

int64_t unshared_bytes(const std::vector<BufferRequest>& requests, int64_t alignment) {
  int64_t total = 0;
  for (const BufferRequest& r : requests) {
    total += align_up(std::max<int64_t>(r.bytes, 1), alignment);
  }
  return total;
}

std::optional<std::string> find_overlap(const MemoryPlan& plan) {
  const auto& b = plan.buffers;
  for (size_t i = 0; i < b.size(); ++i) {
    for (size_t j = i + 1; j < b.size(); ++j) {
      if (!live_together(b[i], b[j])) continue;
      const bool disjoint = b[i].offset + b[i].bytes <= b[j].offset ||
                            b[j].offset + b[j].bytes <= b[i].offset;
      if (!disjoint) {
        return "buffers " + std::to_string(i) + " and " + std::to_string(j) +
               " are live together and overlap";
      }
    }
  }
  return std::nullopt;
}

}  // namespace binconv::runtime
