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

#ifndef BINCONV_CORE_BASE64_H_
#define BINCONV_CORE_BASE64_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace binconv {

std::string base64_encode(std::span<const uint8_t> bytes);
// Throws Error on malformed input.
std::vector<uint8_t> base64_decode(std::string_view text);

}  // namespace binconv

#endif  // BINCONV_CORE_BASE64_H_
