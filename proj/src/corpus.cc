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

#include "mwetag/corpus.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace mwetag {
namespace {

constexpr std::size_t kMinFields = 5;
constexpr std::size_t kMaxFields = 9;

std::string_view Trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto begin = s.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(kSpace);
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool ParseInt(std::string_view text, int* value) {
  text = Trim(text);
  if (text.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), *value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::size_t LineOfByte(std::string_view text, std::size_t byte_offset) {
  return 1 + std::count(text.begin(), text.begin() + byte_offset, '\n');
}

}  // namespace

Label LabelFromIndex(int index) {
  if (index < 0 || index >= kNumLabels) {
    throw Error("label index out of range: " + std::to_string(index));
  }
  return static_cast<Label>(index);
}

char LabelChar(Label l) {
  switch (l) {
    case Label::kB:
      return 'B';
    case Label::kI:
      return 'I';
    case Label::kO:
      return 'O';
  }
  return '?';
}

std::string_view LabelName(Label l) {
  switch (l) {
    case Label::kB:
      return "B";
    case Label::kI:
      return "I";
    case Label::kO:
      return "O";
  }
  return "?";
}

std::size_t Corpus::num_tokens() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

ParseError::ParseError(std::size_t line_no, const std::string& what)
    : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what
                        : what),
      line_no_(line_no) {}

MalformedRecord::MalformedRecord(std::size_t line_no, const std::string& detail)
    : ParseError(line_no, "malformed record: " + detail) {}

UnknownTag::UnknownTag(std::size_t line_no, std::string raw)
    : ParseError(line_no, "unknown MWE tag '" + raw + "'"),
      raw_(std::move(raw)) {}

NonConsecutiveOffset::NonConsecutiveOffset(std::size_t line_no, int expected,
                                           int found)
    : ParseError(line_no, "token offset " + std::to_string(found) + " where " +
                              std::to_string(expected) + " was expected") {}

InvalidUtf8::InvalidUtf8(std::size_t line_no, std::size_t byte_offset)
    : ParseError(line_no,
                 "invalid UTF-8 at byte offset " + std::to_string(byte_offset)),
      byte_offset_(byte_offset) {}

Label NormalizeTag(std::string_view raw) {
  const std::string_view tag = Trim(raw);
  if (tag == "B" || tag == "b") return Label::kB;
  if (tag == "I" || tag == "i" || tag == "\xC4\xAA" /* Ī */) return Label::kI;
  if (tag == "O" || tag == "o") return Label::kO;
  throw UnknownTag(0, std::string(raw));
}

std::size_t FindInvalidUtf8(std::string_view text) {
  const auto* p = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char c = p[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    unsigned char lo = 0x80, hi = 0xBF;  // bounds for the second byte
    if (c >= 0xC2 && c <= 0xDF) {
      len = 2;
    } else if (c >= 0xE0 && c <= 0xEF) {
      len = 3;
      if (c == 0xE0) lo = 0xA0;  // overlong
      if (c == 0xED) hi = 0x9F;  // surrogates
    } else if (c >= 0xF0 && c <= 0xF4) {
      len = 4;
      if (c == 0xF0) lo = 0x90;
      if (c == 0xF4) hi = 0x8F;
    } else {
      return i;
    }
    if (i + len > n) return i;
    if (p[i + 1] < lo || p[i + 1] > hi) return i;
    for (std::size_t k = 2; k < len; ++k) {
      if ((p[i + k] & 0xC0) != 0x80) return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

Corpus ParseDimsum(std::istream& input, std::string split_name) {
  const std::string text{std::istreambuf_iterator<char>(input),
                         std::istreambuf_iterator<char>()};
  if (const auto bad = FindInvalidUtf8(text); bad != std::string_view::npos) {
    throw InvalidUtf8(LineOfByte(text, bad), bad);
  }

  Corpus corpus;
  corpus.split_name = std::move(split_name);
  Sentence current;

  auto flush = [&]() {
    if (current.tokens.empty()) return;
    current.id = current.tokens.front().sentence_id;
    if (current.id.empty()) {
      current.id = std::to_string(corpus.sentences.size());
    }
    corpus.sentences.push_back(std::move(current));
    current = Sentence();
  };

  const std::string_view all(text);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < all.size()) {
    auto end = all.find('\n', pos);
    if (end == std::string_view::npos) end = all.size();
    std::string_view line = all.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (Trim(line).empty()) {
      flush();
      continue;
    }

    const auto fields = SplitTabs(line);
    if (fields.size() < kMinFields) {
      throw MalformedRecord(line_no,
                            "expected at least 5 tab-separated "
                            "fields, found " +
                                std::to_string(fields.size()));
    }
    auto field = [&](std::size_t i) -> std::string {
      return i < fields.size() && i < kMaxFields ? std::string(fields[i])
                                                 : std::string();
    };

    Token token;
    if (!ParseInt(fields[0], &token.offset) || token.offset < 1) {
      throw MalformedRecord(line_no, "token offset '" + std::string(fields[0]) +
                                         "' is not a positive integer");
    }
    const int expected = static_cast<int>(current.tokens.size()) + 1;
    if (token.offset != expected) {
      throw NonConsecutiveOffset(line_no, expected, token.offset);
    }
    token.word = field(1);
    if (token.word.empty()) throw MalformedRecord(line_no, "empty word");
    token.lemma = field(2);
    token.pos = field(3);
    token.mwe_tag_raw = field(4);
    if (fields.size() > 5 && !Trim(fields[5]).empty()) {
      if (!ParseInt(fields[5], &token.parent_offset) ||
          token.parent_offset < 0) {
        throw MalformedRecord(line_no, "parent offset '" +
                                           std::string(fields[5]) +
                                           "' is not a non-negative integer");
      }
    }
    token.strength = field(6);
    token.supersense = field(7);
    token.sentence_id = field(8);

    Label label;
    try {
      label = NormalizeTag(token.mwe_tag_raw);
    } catch (const UnknownTag&) {
      throw UnknownTag(line_no, token.mwe_tag_raw);
    }
    current.tokens.push_back(std::move(token));
    current.labels.push_back(label);
  }
  flush();
  return corpus;
}

Corpus ParseDimsumFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file '" + path + "'");
  return ParseDimsum(in, path);
}

void WriteDimsum(const Corpus& corpus, std::ostream& output) {
  for (const auto& sentence : corpus.sentences) {
    for (const auto& t : sentence.tokens) {
      output << t.offset << '\t' << t.word << '\t' << t.lemma << '\t' << t.pos
             << '\t' << t.mwe_tag_raw << '\t' << t.parent_offset << '\t'
             << t.strength << '\t' << t.supersense << '\t' << t.sentence_id
             << '\n';
    }
    output << '\n';
  }
}

CorpusStats ComputeStats(const Corpus& corpus) {
  CorpusStats stats;
  stats.num_sentences = corpus.sentences.size();
  for (const auto& sentence : corpus.sentences) {
    stats.num_tokens += sentence.size();
    for (Label l : sentence.labels) ++stats.label_histogram[LabelIndex(l)];
  }
  return stats;
}

Corpus ExcludeSentences(const Corpus& corpus,
                        const std::vector<std::string>& sentence_ids) {
  const std::unordered_set<std::string> drop(sentence_ids.begin(),
                                             sentence_ids.end());
  Corpus out;
  out.split_name = corpus.split_name;
  for (const auto& s : corpus.sentences) {
    if (!drop.contains(s.id)) out.sentences.push_back(s);
  }
  return out;
}

}  // namespace mwetag
