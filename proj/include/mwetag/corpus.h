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

// Reader and writer for DiMSUM-style corpora: one token per line, nine
// tab-separated columns (offset, word, lemma, POS, MWE tag, parent offset,
// strength, supersense, sentence id), blank lines between sentences.

#ifndef MWETAG_CORPUS_H_
#define MWETAG_CORPUS_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mwetag/error.h"

namespace mwetag {

// The three MWE token classes. The numeric value is the class index used by
// every model and metric, so B sorts first and wins ties.
enum class Label : std::uint8_t { kB = 0, kI = 1, kO = 2 };

inline constexpr int kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::kB, Label::kI, Label::kO};

using LabelSequence = std::vector<Label>;

inline int LabelIndex(Label l) { return static_cast<int>(l); }
Label LabelFromIndex(int index);
char LabelChar(Label l);
std::string_view LabelName(Label l);

struct Token {
  int offset = 0;  // 1-based position in the sentence
  std::string word;
  std::string lemma;
  std::string pos;
  std::string mwe_tag_raw;
  int parent_offset = 0;
  std::string strength;
  std::string supersense;
  std::string sentence_id;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string id;
  std::vector<Token> tokens;
  LabelSequence labels;  // normalized tags, parallel to tokens

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::vector<Sentence> sentences;
  std::string split_name;

  std::size_t num_sentences() const { return sentences.size(); }
  std::size_t num_tokens() const;
  bool operator==(const Corpus&) const = default;
};

struct CorpusStats {
  std::size_t num_sentences = 0;
  std::size_t num_tokens = 0;
  std::array<std::size_t, kNumLabels> label_histogram{};  // indexed by Label

  bool operator==(const CorpusStats&) const = default;
};

// Parse failures carry the 1-based line number they were detected on
// (0 when the failure is not tied to a line).
class ParseError : public Error {
 public:
  ParseError(std::size_t line_no, const std::string& what);
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class MalformedRecord : public ParseError {
 public:
  MalformedRecord(std::size_t line_no, const std::string& detail);
};

class UnknownTag : public ParseError {
 public:
  UnknownTag(std::size_t line_no, std::string raw);
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

class NonConsecutiveOffset : public ParseError {
 public:
  NonConsecutiveOffset(std::size_t line_no, int expected, int found);
};

class InvalidUtf8 : public ParseError {
 public:
  InvalidUtf8(std::size_t line_no, std::size_t byte_offset);
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

// Maps a raw MWE tag onto the three-class alphabet. Surrounding whitespace
// is ignored; lowercase (weak) variants fold onto their uppercase class.
// Throws UnknownTag (line 0) for anything else.
Label NormalizeTag(std::string_view raw);

// Reads a whole corpus. Throws a ParseError subclass on the first bad line.
Corpus ParseDimsum(std::istream& input, std::string split_name = "");
Corpus ParseDimsumFile(const std::string& path);

// Writes the nine-column layout back out. ParseDimsum(WriteDimsum(c)) == c.
void WriteDimsum(const Corpus& corpus, std::ostream& output);

CorpusStats ComputeStats(const Corpus& corpus);

// Returns a copy of `corpus` without the sentences whose id is listed.
Corpus ExcludeSentences(const Corpus& corpus,
                        const std::vector<std::string>& sentence_ids);

// Returns the byte offset of the first invalid UTF-8 sequence, or npos.
std::size_t FindInvalidUtf8(std::string_view text);

}  // namespace mwetag

#endif  // MWETAG_CORPUS_H_
