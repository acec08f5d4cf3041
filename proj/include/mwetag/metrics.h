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

// Token-level classification scores over the B/I/O alphabet, plus
// exact-match span scores for diagnostics.

#ifndef MWETAG_METRICS_H_
#define MWETAG_METRICS_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "mwetag/corpus.h"
#include "mwetag/error.h"
#include "mwetag/tagscheme.h"

namespace mwetag {

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold tokens of this class
};

struct EvalReport {
  std::array<ClassScores, kNumLabels> per_class;  // indexed by Label
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double macro_f1 = 0.0;
  // confusion[gold][predicted]
  std::array<std::array<std::size_t, kNumLabels>, kNumLabels> confusion{};
  std::size_t n_tokens = 0;

  double accuracy() const;
};

struct SpanScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
};

// Ratios with a zero denominator are 0. Macro F1 averages all three
// classes, including ones with no support; weighted scores are the
// support-weighted means of the per-class values.
//
// Throws LengthMismatch when the lists or any sentence pair differ in
// length, and Error when there are no tokens at all.
EvalReport EvaluateTokens(std::span<const LabelSequence> gold,
                          std::span<const LabelSequence> predicted);

// Exact (start, end) matches after decoding both sides with TagsToSpans.
SpanScores EvaluateSpans(std::span<const LabelSequence> gold,
                         std::span<const LabelSequence> predicted,
                         SchemeMode mode);

// Stable key order, six decimals for every ratio:
// {"per_class": {"B": {...}, "I": {...}, "O": {...}},
//  "weighted": {"precision", "recall", "f1"},
//  "macro_f1": x, "confusion": [[...]], "n_tokens": n}
std::string ReportToJson(const EvalReport& report);
EvalReport ReportFromJson(std::string_view json);

// "weighted_recall=... weighted_precision=... weighted_f1=... macro_f1=..."
std::string ReportSummary(const EvalReport& report);

}  // namespace mwetag

#endif  // MWETAG_METRICS_H_
