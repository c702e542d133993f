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

#include "binconv/kernels/parallel.h"

#include <algorithm>
#include <thread>
#include <vector>

namespace binconv::kernels {

void parallel_for(int64_t begin, int64_t end, int threads,
                  const std::function<void(int64_t, int64_t)>& fn) {
  const int64_t total = end - begin;
  if (total <= 0) return;
  const int64_t workers = std::clamp<int64_t>(threads, 1, total);
  if (workers == 1) {
    fn(begin, end);
    return;
  }
  const int64_t chunk = (total + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (int64_t w = 1; w < workers; ++w) {
    const int64_t lo = begin + w * chunk;
    const int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  fn(begin, std::min(end, begin + chunk));
}

}  // namespace binconv::kernels
