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

// "MWEP" parameter container.
//
// Layout, all integers little-endian u32:
//
//   "MWEP" | version (=1) | header length | header bytes | tensor count |
//   per tensor: name length | name | rank | dims... | f64 payload
//
// Payloads are row-major. The header is opaque to this layer; model files
// put a JSON document there.

#ifndef MWETAG_PARAM_IO_H_
#define MWETAG_PARAM_IO_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mwetag/error.h"
#include "mwetag/tensor.h"

namespace mwetag {

inline constexpr std::uint32_t kParamBlobVersion = 1;

class BadMagic : public Error {
 public:
  using Error::Error;
};

class VersionUnsupported : public Error {
 public:
  using Error::Error;
};

class CorruptPayload : public Error {
 public:
  using Error::Error;
};

struct NamedTensor {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<double> values;
};

struct ParamBlob {
  std::string header;
  std::vector<NamedTensor> tensors;

  const NamedTensor* Find(std::string_view name) const;
};

void WriteParamBlob(std::ostream& out, std::string_view header,
                    std::span<const ConstTensorView> tensors);

// Throws BadMagic, VersionUnsupported or CorruptPayload (short reads and
// inconsistent sizes).
ParamBlob ReadParamBlob(std::istream& in);

// Copies a stored tensor into `target`, which must have the same shape.
// Throws CorruptPayload if the tensor is missing or differently shaped.
void RestoreTensor(const ParamBlob& blob, const TensorView& target);

}  // namespace mwetag

#endif  // MWETAG_PARAM_IO_H_
