// Copyright 2026 The mwetag Authors.
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

// Little-endian primitive encoding shared by the binary file formats.

#ifndef MWETAG_SRC_BINARY_IO_H_
#define MWETAG_SRC_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

namespace mwetag::internal {

inline void PutU32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {
      static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
      static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

inline void PutU64(std::ostream& out, std::uint64_t v) {
  PutU32(out, static_cast<std::uint32_t>(v & 0xFFFFFFFFu));
  PutU32(out, static_cast<std::uint32_t>(v >> 32));
}

inline void PutF32(std::ostream& out, float v) {
  PutU32(out, std::bit_cast<std::uint32_t>(v));
}

inline void PutF64(std::ostream& out, double v) {
  PutU64(out, std::bit_cast<std::uint64_t>(v));
}

// Readers return nullopt on a short read.
inline std::optional<std::uint32_t> GetU32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return std::nullopt;
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::optional<std::uint64_t> GetU64(std::istream& in) {
  const auto lo = GetU32(in);
  if (!lo) return std::nullopt;
  const auto hi = GetU32(in);
  if (!hi) return std::nullopt;
  return static_cast<std::uint64_t>(*lo) |
         (static_cast<std::uint64_t>(*hi) << 32);
}

inline std::optional<float> GetF32(std::istream& in) {
  const auto v = GetU32(in);
  if (!v) return std::nullopt;
  return std::bit_cast<float>(*v);
}

inline std::optional<double> GetF64(std::istream& in) {
  const auto v = GetU64(in);
  if (!v) return std::nullopt;
  return std::bit_cast<double>(*v);
}

inline std::optional<std::string> GetBytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    return std::nullopt;
  }
  return s;
}

}  // namespace mwetag::internal

#endif  // MWETAG_SRC_BINARY_IO_H_
