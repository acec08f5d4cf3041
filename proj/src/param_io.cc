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

#include "mwetag/param_io.h"

#include <algorithm>
#include <istream>
#include <ostream>

#include "binary_io.h"

namespace mwetag {
namespace {

constexpr char kMagic[4] = {'M', 'W', 'E', 'P'};
// Guards allocation sizes when reading untrusted files.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <typename T>
T Need(std::optional<T> v, const char* what) {
  if (!v)
    throw CorruptPayload(std::string("truncated parameter file: ") + what);
  return *v;
}

}  // namespace

const NamedTensor* ParamBlob::Find(std::string_view name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void WriteParamBlob(std::ostream& out, std::string_view header,
                    std::span<const ConstTensorView> tensors) {
  using namespace internal;
  out.write(kMagic, 4);
  PutU32(out, kParamBlobVersion);
  PutU32(out, static_cast<std::uint32_t>(header.size()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  PutU32(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    PutU32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    PutU32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) PutU32(out, d);
    for (double v : t.values) PutF64(out, v);
  }
  if (!out) throw Error("failed writing parameter file");
}

ParamBlob ReadParamBlob(std::istream& in) {
  using namespace internal;
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw BadMagic("not a parameter file (expected magic MWEP)");
  }
  const auto version = Need(GetU32(in), "version");
  if (version != kParamBlobVersion) {
    throw VersionUnsupported("unsupported parameter file version " +
                             std::to_string(version));
  }
  ParamBlob blob;
  const auto header_len = Need(GetU32(in), "header length");
  blob.header = Need(GetBytes(in, header_len), "header");
  const auto count = Need(GetU32(in), "tensor count");
  for (std::uint32_t k = 0; k < count; ++k) {
    NamedTensor t;
    const auto name_len = Need(GetU32(in), "name length");
    t.name = Need(GetBytes(in, name_len), "tensor name");
    const auto rank = Need(GetU32(in), "rank");
    if (rank > 8) throw CorruptPayload("implausible tensor rank");
    std::uint64_t elements = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      t.shape.push_back(Need(GetU32(in), "dimension"));
      elements *= t.shape.back();
      if (elements > kMaxElements) {
        throw CorruptPayload("tensor '" + t.name + "' is implausibly large");
      }
    }
    t.values.reserve(elements);
    for (std::uint64_t i = 0; i < elements; ++i) {
      t.values.push_back(Need(GetF64(in), "tensor payload"));
    }
    blob.tensors.push_back(std::move(t));
  }
  return blob;
}

void RestoreTensor(const ParamBlob& blob, const TensorView& target) {
  const NamedTensor* t = blob.Find(target.name);
  if (t == nullptr) {
    throw CorruptPayload("parameter file lacks tensor '" + target.name + "'");
  }
  if (t->shape != target.shape || t->values.size() != target.values.size()) {
    throw CorruptPayload("tensor '" + target.name + "' has the wrong shape");
  }
  std::copy(t->values.begin(), t->values.end(), target.values.begin());
}

}  // namespace mwetag
