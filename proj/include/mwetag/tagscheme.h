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

// IOB1/IOB2 validation and conversion between label sequences and spans.

#ifndef MWETAG_TAGSCHEME_H_
#define MWETAG_TAGSCHEME_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mwetag/corpus.h"
#include "mwetag/error.h"

namespace mwetag {

// IOB1: B appears only where a chunk immediately follows another chunk.
// IOB2: every chunk opens with B.
enum class SchemeMode { kIob1, kIob2 };

SchemeMode ParseSchemeMode(std::string_view name);  // "iob1" | "iob2"
std::string_view SchemeModeName(SchemeMode mode);

// Half-open token range [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct Violation {
  std::size_t position = 0;
  std::string reason;

  bool operator==(const Violation&) const = default;
};

class StrictModeViolation : public Error {
 public:
  explicit StrictModeViolation(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

class OverlappingSpans : public Error {
 public:
  using Error::Error;
};

class SpanOutOfRange : public Error {
 public:
  using Error::Error;
};

std::vector<Violation> Validate(std::span<const Label> labels, SchemeMode mode);

// Decodes chunks. Invalid prefixes are repaired rather than rejected: an I
// with no open chunk starts one, and B always starts one. With `strict`
// set, any Validate() violation throws StrictModeViolation instead.
std::vector<Span> TagsToSpans(std::span<const Label> labels, SchemeMode mode,
                              bool strict = false);

// Encodes sorted, disjoint spans. Throws OverlappingSpans or SpanOutOfRange.
LabelSequence SpansToTags(std::span<const Span> spans, std::size_t length,
                          SchemeMode mode);

}  // namespace mwetag

#endif  // MWETAG_TAGSCHEME_H_
