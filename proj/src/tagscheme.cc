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

#include "mwetag/tagscheme.h"

namespace mwetag {

SchemeMode ParseSchemeMode(std::string_view name) {
  if (name == "iob1" || name == "IOB1") return SchemeMode::kIob1;
  if (name == "iob2" || name == "IOB2") return SchemeMode::kIob2;
  throw Error("unknown tag scheme '" + std::string(name) +
              "' (expected iob1 or iob2)");
}

std::string_view SchemeModeName(SchemeMode mode) {
  return mode == SchemeMode::kIob1 ? "iob1" : "iob2";
}

StrictModeViolation::StrictModeViolation(std::vector<Violation> violations)
    : Error("label sequence violates the tag scheme at position " +
            std::to_string(violations.front().position) + ": " +
            violations.front().reason),
      violations_(std::move(violations)) {}

std::vector<Violation> Validate(std::span<const Label> labels,
                                SchemeMode mode) {
  std::vector<Violation> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool after_outside = i == 0 || labels[i - 1] == Label::kO;
    if (mode == SchemeMode::kIob1 && labels[i] == Label::kB && after_outside) {
      out.push_back({i, "B without preceding chunk"});
    } else if (mode == SchemeMode::kIob2 && labels[i] == Label::kI &&
               after_outside) {
      out.push_back({i, i == 0 ? "I at sentence start" : "I after O"});
    }
  }
  return out;
}

std::vector<Span> TagsToSpans(std::span<const Label> labels, SchemeMode mode,
                              bool strict) {
  if (strict) {
    auto violations = Validate(labels, mode);
    if (!violations.empty()) throw StrictModeViolation(std::move(violations));
  }
  // Decoding is the same automaton for both schemes; they differ only in
  // which sequences Validate() accepts.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<Span> spans;
  std::size_t open = kNone;  // start of the chunk being read
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels[i]) {
      case Label::kO:
        if (open != kNone) spans.push_back({open, i});
        open = kNone;
        break;
      case Label::kB:
        if (open != kNone) spans.push_back({open, i});
        open = i;
        break;
      case Label::kI:
        if (open == kNone) open = i;
        break;
    }
  }
  if (open != kNone) spans.push_back({open, labels.size()});
  return spans;
}

LabelSequence SpansToTags(std::span<const Span> spans, std::size_t length,
                          SchemeMode mode) {
  LabelSequence tags(length, Label::kO);
  std::size_t previous_end = 0;
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const Span& s = spans[k];
    if (s.start >= s.end || s.end > length) {
      throw SpanOutOfRange("span [" + std::to_string(s.start) + ", " +
                           std::to_string(s.end) + ") invalid for length " +
                           std::to_string(length));
    }
    if (k > 0 && s.start < previous_end) {
      throw OverlappingSpans("span starting at " + std::to_string(s.start) +
                             " overlaps or precedes the previous span");
    }
    const bool adjacent = k > 0 && s.start == previous_end;
    const bool opens_with_b = mode == SchemeMode::kIob2 || adjacent;
    tags[s.start] = opens_with_b ? Label::kB : Label::kI;
    for (std::size_t i = s.start + 1; i < s.end; ++i) tags[i] = Label::kI;
    previous_end = s.end;
  }
  return tags;
}

}  // namespace mwetag
