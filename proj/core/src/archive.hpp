// Copyright 2026 The banglanlu Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Binary model archive: magic, version, a JSON header describing the
// tensors, then little-endian float64 payloads in row-major order.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "banglanlu/nn.hpp"
#include "json.hpp"

namespace bnlu::archive {

inline constexpr std::string_view kMagic = "BNLUARCH";
inline constexpr std::uint32_t kVersion = 1;

struct Contents {
  nlohmann::json header;
  nn::ParameterSet tensors;
};

/// Header must be a JSON object; a "tensors" key is added.
std::string write(nlohmann::json header, const nn::ParameterSet& tensors);

/// Throws Error(ArchiveFormat) on any structural problem.
Contents read(std::string_view bytes);

/// Copies every tensor of `dst` from the same-named tensor in `src`.
/// Throws Error(ArchiveFormat) on a missing name or a shape mismatch.
void restore(nn::ParameterSet& dst, const nn::ParameterSet& src);

/// Typed header access that maps json errors to Error(ArchiveFormat).
template <typename T>
T field(const nlohmann::json& j, const char* key);

}  // namespace bnlu::archive

#include "archive_inl.hpp"
