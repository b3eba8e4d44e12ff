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

#include "archive.hpp"

#include <bit>
#include <cstring>

#include "banglanlu/errors.hpp"

namespace bnlu::archive {
namespace {

static_assert(std::endian::native == std::endian::little,
              "archive I/O assumes a little-endian host");

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::ArchiveFormat, "model archive: " + what);
}

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view bytes, std::size_t& pos) {
  if (bytes.size() - pos < sizeof(T)) bad("truncated");
  T value;
  std::memcpy(&value, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::string write(nlohmann::json header, const nn::ParameterSet& tensors) {
  nlohmann::json table = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const nn::Parameter& p : tensors.entries()) {
    table.push_back({{"name", p.name},
                     {"rows", p.value.rows()},
                     {"cols", p.value.cols()},
                     {"offset", offset}});
    offset += static_cast<std::uint64_t>(p.value.size());
  }
  header["tensors"] = std::move(table);
  const std::string text = header.dump();

  std::string out(kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, text.size());
  out += text;
  out.reserve(out.size() + offset * sizeof(double));
  for (const nn::Parameter& p : tensors.entries()) {
    out.append(reinterpret_cast<const char*>(p.value.data()),
               static_cast<std::size_t>(p.value.size()) * sizeof(double));
  }
  return out;
}

Contents read(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) bad("bad magic");
  std::size_t pos = kMagic.size();
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kVersion) bad("unsupported version " + std::to_string(version));
  const auto header_len = take<std::uint64_t>(bytes, pos);
  if (bytes.size() - pos < header_len) bad("truncated header");

  Contents c;
  try {
    c.header = nlohmann::json::parse(bytes.substr(pos, header_len));
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("header is not JSON: ") + e.what());
  }
  if (!c.header.is_object() || !c.header.contains("tensors")) bad("header lacks tensors");
  pos += header_len;
  const std::size_t data_start = pos;
  const std::size_t data_size = bytes.size() - data_start;

  for (const auto& t : c.header["tensors"]) {
    const auto name = field<std::string>(t, "name");
    const auto rows = field<std::int64_t>(t, "rows");
    const auto cols = field<std::int64_t>(t, "cols");
    const auto offset = field<std::uint64_t>(t, "offset");
    if (rows < 0 || cols < 0) bad("negative shape for " + name);
    const auto count = static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols);
    if (offset > data_size / sizeof(double) || count > data_size / sizeof(double) - offset) {
      bad("tensor " + name + " exceeds payload");
    }
    const std::size_t idx = c.tensors.add(name, rows, cols);
    std::memcpy(c.tensors[idx].data(), bytes.data() + data_start + offset * sizeof(double),
                count * sizeof(double));
  }
  if (!c.tensors.all_finite()) bad("non-finite tensor values");
  return c;
}

void restore(nn::ParameterSet& dst, const nn::ParameterSet& src) {
  for (nn::Parameter& p : dst.entries()) {
    const nn::Matrix& from = src[src.index_of(p.name)];
    if (from.rows() != p.value.rows() || from.cols() != p.value.cols()) {
      bad("shape mismatch for " + p.name);
    }
    p.value = from;
  }
}

}  // namespace bnlu::archive
