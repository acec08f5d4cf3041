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

#include "mwetag/metrics.h"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace mwetag {
namespace {

double Ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double HarmonicMean(double p, double r) {
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

void CheckLengths(std::span<const LabelSequence> gold,
                  std::span<const LabelSequence> predicted) {
  if (gold.size() != predicted.size()) {
    throw LengthMismatch("gold has " + std::to_string(gold.size()) +
                         " sentences, predictions " +
                         std::to_string(predicted.size()));
  }
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != predicted[s].size()) {
      throw LengthMismatch("sentence " + std::to_string(s) +
                           ": gold and predicted lengths differ");
    }
  }
}

std::string Fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double EvalReport::accuracy() const {
  std::size_t correct = 0;
  for (int c = 0; c < kNumLabels; ++c) correct += confusion[c][c];
  return Ratio(correct, n_tokens);
}

EvalReport EvaluateTokens(std::span<const LabelSequence> gold,
                          std::span<const LabelSequence> predicted) {
  CheckLengths(gold, predicted);
  EvalReport r;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (std::size_t t = 0; t < gold[s].size(); ++t) {
      ++r.confusion[LabelIndex(gold[s][t])][LabelIndex(predicted[s][t])];
      ++r.n_tokens;
    }
  }
  if (r.n_tokens == 0) throw Error("cannot evaluate an empty set of tokens");

  for (int c = 0; c < kNumLabels; ++c) {
    std::size_t tp = r.confusion[c][c];
    std::size_t gold_total = 0;
    std::size_t predicted_total = 0;
    for (int k = 0; k < kNumLabels; ++k) {
      gold_total += r.confusion[c][k];
      predicted_total += r.confusion[k][c];
    }
    ClassScores& cs = r.per_class[c];
    cs.support = gold_total;
    cs.precision = Ratio(tp, predicted_total);
    cs.recall = Ratio(tp, gold_total);
    cs.f1 = HarmonicMean(cs.precision, cs.recall);
  }

  // Sum first, divide once: a perfect run then scores exactly 1.
  for (const ClassScores& cs : r.per_class) {
    const double w = static_cast<double>(cs.support);
    r.weighted_precision += w * cs.precision;
    r.weighted_recall += w * cs.recall;
    r.weighted_f1 += w * cs.f1;
    r.macro_f1 += cs.f1;
  }
  const double n = static_cast<double>(r.n_tokens);
  r.weighted_precision /= n;
  r.weighted_recall /= n;
  r.weighted_f1 /= n;
  r.macro_f1 /= kNumLabels;
  return r;
}

SpanScores EvaluateSpans(std::span<const LabelSequence> gold,
                         std::span<const LabelSequence> predicted,
                         SchemeMode mode) {
  CheckLengths(gold, predicted);
  SpanScores out;
  std::size_t gold_count = 0;
  std::size_t predicted_count = 0;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto g = TagsToSpans(gold[s], mode);
    const auto p = TagsToSpans(predicted[s], mode);
    gold_count += g.size();
    predicted_count += p.size();
    // Both lists are sorted and disjoint, so a merge finds exact matches.
    std::size_t i = 0, j = 0;
    while (i < g.size() && j < p.size()) {
      if (g[i] == p[j]) {
        ++out.true_positives;
        ++i;
        ++j;
      } else if (g[i].start < p[j].start ||
                 (g[i].start == p[j].start && g[i].end < p[j].end)) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  out.false_positives = predicted_count - out.true_positives;
  out.false_negatives = gold_count - out.true_positives;
  out.precision = Ratio(out.true_positives, predicted_count);
  out.recall = Ratio(out.true_positives, gold_count);
  out.f1 = HarmonicMean(out.precision, out.recall);
  return out;
}

std::string ReportToJson(const EvalReport& r) {
  std::ostringstream os;
  os << "{\"per_class\": {";
  for (int c = 0; c < kNumLabels; ++c) {
    const ClassScores& cs = r.per_class[c];
    if (c > 0) os << ", ";
    os << '"' << LabelName(LabelFromIndex(c))
       << "\": {\"precision\": " << Fixed6(cs.precision)
       << ", \"recall\": " << Fixed6(cs.recall) << ", \"f1\": " << Fixed6(cs.f1)
       << ", \"support\": " << cs.support << '}';
  }
  os << "}, \"weighted\": {\"precision\": " << Fixed6(r.weighted_precision)
     << ", \"recall\": " << Fixed6(r.weighted_recall)
     << ", \"f1\": " << Fixed6(r.weighted_f1)
     << "}, \"macro_f1\": " << Fixed6(r.macro_f1) << ", \"confusion\": [";
  for (int g = 0; g < kNumLabels; ++g) {
    if (g > 0) os << ", ";
    os << '[';
    for (int p = 0; p < kNumLabels; ++p) {
      if (p > 0) os << ", ";
      os << r.confusion[g][p];
    }
    os << ']';
  }
  os << "], \"n_tokens\": " << r.n_tokens << "}";
  return os.str();
}

EvalReport ReportFromJson(std::string_view json) {
  EvalReport r;
  try {
    const auto doc = nlohmann::json::parse(json);
    for (int c = 0; c < kNumLabels; ++c) {
      const auto& cls =
          doc.at("per_class").at(std::string(LabelName(LabelFromIndex(c))));
      r.per_class[c].precision = cls.at("precision").get<double>();
      r.per_class[c].recall = cls.at("recall").get<double>();
      r.per_class[c].f1 = cls.at("f1").get<double>();
      r.per_class[c].support = cls.at("support").get<std::size_t>();
    }
    const auto& weighted = doc.at("weighted");
    r.weighted_precision = weighted.at("precision").get<double>();
    r.weighted_recall = weighted.at("recall").get<double>();
    r.weighted_f1 = weighted.at("f1").get<double>();
    r.macro_f1 = doc.at("macro_f1").get<double>();
    const auto& confusion = doc.at("confusion");
    for (int g = 0; g < kNumLabels; ++g) {
      for (int p = 0; p < kNumLabels; ++p) {
        r.confusion[g][p] = confusion.at(g).at(p).get<std::size_t>();
      }
    }
    r.n_tokens = doc.at("n_tokens").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed evaluation report: ") + e.what());
  }
  return r;
}

std::string ReportSummary(const EvalReport& r) {
  return "weighted_recall=" + Fixed6(r.weighted_recall) +
         " weighted_precision=" + Fixed6(r.weighted_precision) +
         " weighted_f1=" + Fixed6(r.weighted_f1) +
         " macro_f1=" + Fixed6(r.macro_f1);
}

}  // namespace mwetag
