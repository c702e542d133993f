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

#ifndef BINCONV_KERNELS_PARALLEL_H_
#define BINCONV_KERNELS_PARALLEL_H_

#include <cstdint>
#include <functional>

namespace binconv::kernels {

// Splits [begin, end) into at most `threads` contiguous chunks and runs `fn`
// on each; the calling thread takes the first chunk. Chunk boundaries depend
// only on the range and thread count.
void parallel_for(int64_t begin, int64_t end, int threads,
                  const std::function<void(int64_t, int64_t)>& fn);

}  // namespace binconv::kernels

#endif  // BINCONV_KERNELS_PARALLEL_H_
