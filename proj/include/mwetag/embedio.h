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

// "MWEE" files: per-token contextual embeddings exported from a pretrained
// encoder, keyed by sentence position in the source corpus.
//
// Layout (little-endian):
//
//   "MWEE" | version u32 (=1) | dim u32 | n_sentences u32 |
//   per sentence: sentence_index u32 | n_tokens u32 | n_tokens*dim f32
//
// Values are row-major, one row per token.

#ifndef MWETAG_EMBEDIO_H_
#define MWETAG_EMBEDIO_H_

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mwetag/corpus.h"
#include "mwetag/error.h"
#include "mwetag/param_io.h"
#include "mwetag/tensor.h"

namespace mwetag {

inline constexpr std::uint32_t kEmbeddingFileVersion = 1;

using FloatMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SentenceEmbeddings {
  std::uint32_t sentence_index = 0;
  FloatMatrix vectors;  // n_tokens x dim

  bool operator==(const SentenceEmbeddings& o) const {
    return sentence_index == o.sentence_index &&
           vectors.rows() == o.vectors.rows() &&
           vectors.cols() == o.vectors.cols() && vectors == o.vectors;
  }
};

struct EmbeddingFile {
  std::uint32_t dim = 0;
  std::vector<SentenceEmbeddings> sentences;  // strictly increasing index

  bool operator==(const EmbeddingFile&) const = default;
};

class TruncatedFile : public Error {
 public:
  using Error::Error;
};

class NonFiniteValue : public Error {
 public:
  explicit NonFiniteValue(std::size_t position);
  // Index of the offending value among all floats in the file.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Structural problems: dim 0, non-increasing indices, ragged rows.
class InvalidEmbeddingFile : public Error {
 public:
  using Error::Error;
};

class TokenCountMismatch : public Error {
 public:
  TokenCountMismatch(std::uint32_t sentence_index, std::size_t expected,
                     std::size_t found);
  std::uint32_t sentence_index() const { return sentence_index_; }

 private:
  std::uint32_t sentence_index_;
};

// BadMagic and VersionUnsupported are shared with the parameter container.
EmbeddingFile ReadEmbeddings(std::istream& in);
EmbeddingFile ReadEmbeddingsFile(const std::string& path);

void WriteEmbeddings(const EmbeddingFile& file, std::ostream& out);
void WriteEmbeddingsFile(const EmbeddingFile& file, const std::string& path);

// A corpus sentence paired with its embeddings, promoted to double.
struct AlignedSentence {
  std::size_t corpus_index = 0;
  const Sentence* sentence = nullptr;  // points into the joined corpus
  Matrix vectors;                      // n_tokens x dim
};

struct JoinedDataset {
  std::size_t dim = 0;
  std::vector<AlignedSentence> sentences;
  // Corpus sentences that had no entry in the file.
  std::size_t missing = 0;
};

// Pairs every corpus sentence with its embedding rows. The corpus must
// outlive the result. Throws TokenCountMismatch when a file entry's row
// count differs from the sentence length, InvalidEmbeddingFile when an
// index is past the end of the corpus.
JoinedDataset Join(const Corpus& corpus, const EmbeddingFile& file);

}  // namespace mwetag

#endif  // MWETAG_EMBEDIO_H_
