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

// Python bindings. Labels cross the boundary as strings over "BIO" (one
// character per token); spans as (start, end) tuples with end exclusive.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mwetag/corpus.h"
#include "mwetag/crf.h"
#include "mwetag/embedio.h"
#include "mwetag/metrics.h"
#include "mwetag/param_io.h"
#include "mwetag/taggers.h"
#include "mwetag/tagscheme.h"

namespace py = pybind11;

namespace mwetag {
namespace {

LabelSequence ToLabels(const std::string& tags) {
  LabelSequence out;
  out.reserve(tags.size());
  for (char c : tags) out.push_back(NormalizeTag(std::string_view(&c, 1)));
  return out;
}

std::string FromLabels(const LabelSequence& labels) {
  std::string out;
  out.reserve(labels.size());
  for (Label l : labels) out.push_back(LabelChar(l));
  return out;
}

std::vector<LabelSequence> ToLabelLists(const std::vector<std::string>& tags) {
  std::vector<LabelSequence> out;
  out.reserve(tags.size());
  for (const auto& t : tags) out.push_back(ToLabels(t));
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> FromSpans(
    const std::vector<Span>& spans) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& s : spans) out.emplace_back(s.start, s.end);
  return out;
}

crf::CrfParams MakeCrf(const Matrix& transitions, const Vector& start,
                       const Vector& end) {
  return {transitions, start, end};
}

Corpus ParseText(const std::string& text, const std::string& split) {
  std::istringstream in(text);
  return ParseDimsum(in, split);
}

std::string WriteText(const Corpus& corpus) {
  std::ostringstream out;
  WriteDimsum(corpus, out);
  return out.str();
}

TrainResult TrainLinear(const Corpus& corpus, const EmbeddingFile& file,
                        const TrainConfig& config) {
  const JoinedDataset joined = Join(corpus, file);
  return TrainLinearHead(joined, config);
}

}  // namespace
}  // namespace mwetag

PYBIND11_MODULE(_mwetag, m) {
  using namespace mwetag;
  m.doc() = "Bindings for the mwetag multiword-expression tagger.";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());

  // Corpus.
  py::class_<Token>(m, "Token")
      .def(py::init<>())
      .def_readwrite("offset", &Token::offset)
      .def_readwrite("word", &Token::word)
      .def_readwrite("lemma", &Token::lemma)
      .def_readwrite("pos", &Token::pos)
      .def_readwrite("mwe_tag", &Token::mwe_tag_raw)
      .def_readwrite("parent_offset", &Token::parent_offset)
      .def_readwrite("strength", &Token::strength)
      .def_readwrite("supersense", &Token::supersense)
      .def_readwrite("sentence_id", &Token::sentence_id);

  py::class_<Sentence>(m, "Sentence")
      .def(py::init<>())
      .def_readwrite("id", &Sentence::id)
      .def_readwrite("tokens", &Sentence::tokens)
      .def_property(
          "labels", [](const Sentence& s) { return FromLabels(s.labels); },
          [](Sentence& s, const std::string& tags) {
            s.labels = ToLabels(tags);
          })
      .def_property_readonly("words",
                             [](const Sentence& s) {
                               std::vector<std::string> w;
                               for (const auto& t : s.tokens)
                                 w.push_back(t.word);
                               return w;
                             })
      .def("__len__", &Sentence::size);

  py::class_<Corpus>(m, "Corpus")
      .def(py::init<>())
      .def_readwrite("sentences", &Corpus::sentences)
      .def_readwrite("split_name", &Corpus::split_name)
      .def_property_readonly("num_sentences", &Corpus::num_sentences)
      .def_property_readonly("num_tokens", &Corpus::num_tokens)
      .def("__len__", &Corpus::num_sentences);

  m.def("parse_dimsum", &ParseText, py::arg("text"), py::arg("split_name") = "",
        "Parses nine-column DiMSUM text.");
  m.def("parse_dimsum_file", &ParseDimsumFile, py::arg("path"));
  m.def("write_dimsum", &WriteText, py::arg("corpus"));
  m.def("exclude_sentences", &ExcludeSentences, py::arg("corpus"),
        py::arg("sentence_ids"));
  m.def(
      "corpus_stats",
      [](const Corpus& c) {
        const CorpusStats s = ComputeStats(c);
        py::dict labels;
        for (Label l : kAllLabels) {
          labels[py::str(std::string(1, LabelChar(l)))] =
              s.label_histogram[LabelIndex(l)];
        }
        py::dict out;
        out["sentences"] = s.num_sentences;
        out["tokens"] = s.num_tokens;
        out["labels"] = labels;
        return out;
      },
      py::arg("corpus"));
  m.def(
      "normalize_tag",
      [](const std::string& raw) {
        return std::string(1, LabelChar(NormalizeTag(raw)));
      },
      py::arg("raw"));

  // Tag schemes.
  m.def(
      "tags_to_spans",
      [](const std::string& tags, const std::string& scheme, bool strict) {
        return FromSpans(
            TagsToSpans(ToLabels(tags), ParseSchemeMode(scheme), strict));
      },
      py::arg("tags"), py::arg("scheme") = "iob2", py::arg("strict") = false);
  m.def(
      "spans_to_tags",
      [](const std::vector<std::pair<std::size_t, std::size_t>>& spans,
         std::size_t length, const std::string& scheme) {
        std::vector<Span> s;
        for (const auto& [a, b] : spans) s.push_back({a, b});
        return FromLabels(SpansToTags(s, length, ParseSchemeMode(scheme)));
      },
      py::arg("spans"), py::arg("length"), py::arg("scheme") = "iob2");
  m.def(
      "validate_tags",
      [](const std::string& tags, const std::string& scheme) {
        std::vector<std::pair<std::size_t, std::string>> out;
        for (const auto& v :
             Validate(ToLabels(tags), ParseSchemeMode(scheme))) {
          out.emplace_back(v.position, v.reason);
        }
        return out;
      },
      py::arg("tags"), py::arg("scheme") = "iob2");

  // Linear-chain CRF.
  m.def(
      "crf_log_partition",
      [](const Matrix& e, const Matrix& tr, const Vector& s, const Vector& en) {
        return crf::LogPartition(e, MakeCrf(tr, s, en));
      },
      py::arg("emissions"), py::arg("transitions"), py::arg("start"),
      py::arg("end"));
  m.def(
      "crf_viterbi",
      [](const Matrix& e, const Matrix& tr, const Vector& s, const Vector& en) {
        const auto r = crf::Viterbi(e, MakeCrf(tr, s, en));
        return py::make_tuple(r.path, r.score);
      },
      py::arg("emissions"), py::arg("transitions"), py::arg("start"),
      py::arg("end"));
  m.def(
      "crf_marginals",
      [](const Matrix& e, const Matrix& tr, const Vector& s, const Vector& en) {
        return crf::Marginals(e, MakeCrf(tr, s, en));
      },
      py::arg("emissions"), py::arg("transitions"), py::arg("start"),
      py::arg("end"));
  m.def(
      "crf_nll",
      [](const Matrix& e, const Matrix& tr, const Vector& s, const Vector& en,
         const std::vector<int>& gold) {
        const auto r = crf::NllAndGrads(e, MakeCrf(tr, s, en), gold);
        py::dict out;
        out["loss"] = r.loss;
        out["grad_emissions"] = r.grad_emissions;
        out["grad_transitions"] = r.grad_params.transitions;
        out["grad_start"] = r.grad_params.start;
        out["grad_end"] = r.grad_params.end;
        return out;
      },
      py::arg("emissions"), py::arg("transitions"), py::arg("start"),
      py::arg("end"), py::arg("gold"));

  // Metrics. The report travels as its JSON text; the package wrapper
  // decodes it.
  m.def(
      "evaluate_tokens_json",
      [](const std::vector<std::string>& gold,
         const std::vector<std::string>& pred) {
        return ReportToJson(
            EvaluateTokens(ToLabelLists(gold), ToLabelLists(pred)));
      },
      py::arg("gold"), py::arg("predicted"));
  m.def(
      "evaluate_spans",
      [](const std::vector<std::string>& gold,
         const std::vector<std::string>& pred, const std::string& scheme) {
        const SpanScores s = EvaluateSpans(
            ToLabelLists(gold), ToLabelLists(pred), ParseSchemeMode(scheme));
        py::dict out;
        out["precision"] = s.precision;
        out["recall"] = s.recall;
        out["f1"] = s.f1;
        out["true_positives"] = s.true_positives;
        out["false_positives"] = s.false_positives;
        out["false_negatives"] = s.false_negatives;
        return out;
      },
      py::arg("gold"), py::arg("predicted"), py::arg("scheme") = "iob2");

  // Embedding files.
  py::class_<SentenceEmbeddings>(m, "SentenceEmbeddings")
      .def(py::init([](std::uint32_t index, FloatMatrix vectors) {
             return SentenceEmbeddings{index, std::move(vectors)};
           }),
           py::arg("sentence_index"), py::arg("vectors"))
      .def_readwrite("sentence_index", &SentenceEmbeddings::sentence_index)
      .def_readwrite("vectors", &SentenceEmbeddings::vectors);
  py::class_<EmbeddingFile>(m, "EmbeddingFile")
      .def(py::init([](std::uint32_t dim, std::vector<SentenceEmbeddings> s) {
             return EmbeddingFile{dim, std::move(s)};
           }),
           py::arg("dim"),
           py::arg("sentences") = std::vector<SentenceEmbeddings>{})
      .def_readwrite("dim", &EmbeddingFile::dim)
      .def_readwrite("sentences", &EmbeddingFile::sentences);
  m.def("read_embeddings", &ReadEmbeddingsFile, py::arg("path"));
  m.def("write_embeddings", &WriteEmbeddingsFile, py::arg("file"),
        py::arg("path"));

  // Taggers.
  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_static("bilstm_crf_defaults", &TrainConfig::BilstmCrfDefaults)
      .def_static("linear_head_defaults", &TrainConfig::LinearHeadDefaults)
      .def_property_readonly("model_kind",
                             [](const TrainConfig& c) {
                               return std::string(ModelKindName(c.model_kind));
                             })
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("warmup_fraction", &TrainConfig::warmup_fraction)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("hidden_size", &TrainConfig::hidden_size)
      .def_readwrite("embed_dim", &TrainConfig::embed_dim)
      .def_readwrite("clip_norm", &TrainConfig::clip_norm)
      .def_readwrite("init_scale", &TrainConfig::init_scale)
      .def("validate", &TrainConfig::Validate);

  py::class_<TaggerModel>(m, "TaggerModel")
      .def_property_readonly("kind",
                             [](const TaggerModel& t) {
                               return std::string(ModelKindName(t.kind()));
                             })
      .def_readonly("config", &TaggerModel::config)
      .def_property_readonly(
          "vocabulary", [](const TaggerModel& t) { return t.vocab.words(); })
      .def(
          "predict",
          [](const TaggerModel& t, const Sentence& s) {
            return FromLabels(Predict(t, s));
          },
          py::arg("sentence"))
      .def(
          "predict_vectors",
          [](const TaggerModel& t, const Sentence& s, const Matrix& v) {
            return FromLabels(Predict(t, s, v));
          },
          py::arg("sentence"), py::arg("vectors"))
      .def("save", &SaveModelFile, py::arg("path"))
      .def("to_bytes", [](const TaggerModel& t) {
        std::ostringstream out;
        SaveModel(t, out);
        return py::bytes(out.str());
      });
  m.def("load_model", &LoadModelFile, py::arg("path"));
  m.def(
      "load_model_bytes",
      [](const py::bytes& data) {
        std::istringstream in{std::string(data)};
        return LoadModel(in);
      },
      py::arg("data"));

  m.def(
      "train_bilstm_crf",
      [](const Corpus& corpus, const TrainConfig& config) {
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = TrainBilstmCrf(corpus, config);
        }
        return py::make_tuple(std::move(r.model), r.loss_trace);
      },
      py::arg("corpus"), py::arg("config") = TrainConfig::BilstmCrfDefaults(),
      "Returns (model, per-epoch mean loss).");
  m.def(
      "train_linear_head",
      [](const Corpus& corpus, const EmbeddingFile& file,
         const TrainConfig& config) {
        TrainResult r;
        {
          py::gil_scoped_release release;
          r = TrainLinear(corpus, file, config);
        }
        return py::make_tuple(std::move(r.model), r.loss_trace);
      },
      py::arg("corpus"), py::arg("embeddings"),
      py::arg("config") = TrainConfig::LinearHeadDefaults(),
      "Trains on the corpus sentences present in the embedding file.");
}
