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

#include "mwetag/embedio.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "binary_io.h"

namespace mwetag {
namespace {

constexpr char kMagic[4] = {'M', 'W', 'E', 'E'};

template <typename T>
T Need(std::optional<T> v, const char* what) {
  if (!v)
    throw TruncatedFile(std::string("embedding file ends inside ") + what);
  return *v;
}

void CheckStructure(const EmbeddingFile& file) {
  if (file.dim == 0) throw InvalidEmbeddingFile("embedding dim must be > 0");
  for (std::size_t k = 0; k < file.sentences.size(); ++k) {
    const auto& s = file.sentences[k];
    if (k > 0 && s.sentence_index <= file.sentences[k - 1].sentence_index) {
      throw InvalidEmbeddingFile("sentence indices must strictly increase");
    }
    if (s.vectors.rows() > 0 &&
        s.vectors.cols() != static_cast<Eigen::Index>(file.dim)) {
      throw InvalidEmbeddingFile(
          "sentence " + std::to_string(s.sentence_index) + " has rows of " +
          std::to_string(s.vectors.cols()) + " values, dim is " +
          std::to_string(file.dim));
    }
  }
}

}  // namespace

NonFiniteValue::NonFiniteValue(std::size_t position)
    : Error("non-finite embedding value at position " +
            std::to_string(position)),
      position_(position) {}

TokenCountMismatch::TokenCountMismatch(std::uint32_t sentence_index,
                                       std::size_t expected, std::size_t found)
    : Error("sentence " + std::to_string(sentence_index) + " has " +
            std::to_string(expected) + " tokens but " + std::to_string(found) +
            " embedding rows"),
      sentence_index_(sentence_index) {}

EmbeddingFile ReadEmbeddings(std::istream& in) {
  using namespace internal;
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw BadMagic("not an embedding file (expected magic MWEE)");
  }
  const auto version = Need(GetU32(in), "header");
  if (version != kEmbeddingFileVersion) {
    throw VersionUnsupported("unsupported embedding file version " +
                             std::to_string(version));
  }
  EmbeddingFile file;
  file.dim = Need(GetU32(in), "header");
  if (file.dim == 0) throw InvalidEmbeddingFile("embedding dim must be > 0");
  const auto count = Need(GetU32(in), "header");

  std::size_t position = 0;
  for (std::uint32_t k = 0; k < count; ++k) {
    SentenceEmbeddings s;
    s.sentence_index = Need(GetU32(in), "sentence header");
    if (k > 0 && s.sentence_index <= file.sentences.back().sentence_index) {
      throw InvalidEmbeddingFile("sentence indices must strictly increase");
    }
    const auto rows = Need(GetU32(in), "sentence header");
    // Bounded chunks: a bogus row count fails as truncation rather than
    // as one huge allocation.
    const std::uint64_t n = std::uint64_t{rows} * file.dim;
    std::string bytes;
    constexpr std::uint64_t kChunk = 1 << 20;
    for (std::uint64_t done = 0; done < n * 4;) {
      const auto take = std::min<std::uint64_t>(kChunk, n * 4 - done);
      bytes += Need(GetBytes(in, take), "sentence payload");
      done += take;
    }
    s.vectors.resize(rows, file.dim);
    float* out = s.vectors.data();
    for (std::uint64_t i = 0; i < n; ++i, ++position) {
      std::uint32_t bits = 0;
      for (int b = 3; b >= 0; --b) {
        bits = (bits << 8) | static_cast<unsigned char>(bytes[i * 4 + b]);
      }
      out[i] = std::bit_cast<float>(bits);
      if (!std::isfinite(out[i])) throw NonFiniteValue(position);
    }
    file.sentences.push_back(std::move(s));
  }
  return file;
}

EmbeddingFile ReadEmbeddingsFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open embedding file '" + path + "'");
  return ReadEmbeddings(in);
}

void WriteEmbeddings(const EmbeddingFile& file, std::ostream& out) {
  using namespace internal;
  CheckStructure(file);
  out.write(kMagic, 4);
  PutU32(out, kEmbeddingFileVersion);
  PutU32(out, file.dim);
  PutU32(out, static_cast<std::uint32_t>(file.sentences.size()));
  for (const auto& s : file.sentences) {
    PutU32(out, s.sentence_index);
    PutU32(out, static_cast<std::uint32_t>(s.vectors.rows()));
    const float* v = s.vectors.data();
    for (Eigen::Index i = 0; i < s.vectors.size(); ++i) PutF32(out, v[i]);
  }
  if (!out) throw Error("failed writing embedding file");
}

void WriteEmbeddingsFile(const EmbeddingFile& file, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot create embedding file '" + path + "'");
  WriteEmbeddings(file, out);
}

JoinedDataset Join(const Corpus& corpus, const EmbeddingFile& file) {
  JoinedDataset out;
  out.dim = file.dim;
  std::vector<bool> seen(corpus.sentences.size(), false);
  for (const auto& s : file.sentences) {
    if (s.sentence_index >= corpus.sentences.size()) {
      throw InvalidEmbeddingFile(
          "embedding sentence index " + std::to_string(s.sentence_index) +
          " is past the end of the corpus (" +
          std::to_string(corpus.sentences.size()) + " sentences)");
    }
    const Sentence& sentence = corpus.sentences[s.sentence_index];
    if (static_cast<std::size_t>(s.vectors.rows()) != sentence.size()) {
      throw TokenCountMismatch(s.sentence_index, sentence.size(),
                               static_cast<std::size_t>(s.vectors.rows()));
    }
    seen[s.sentence_index] = true;
    out.sentences.push_back(
        {s.sentence_index, &sentence, s.vectors.cast<double>()});
  }
  out.missing =
      static_cast<std::size_t>(std::count(seen.begin(), seen.end(), false));
  return out;
}

}  // namespace mwetag
