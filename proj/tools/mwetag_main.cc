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

// mwetag: command-line front end for the multiword-expression taggers.
//
//   mwetag stats CORPUS
//   mwetag train --config run.cfg
//   mwetag predict --config run.cfg --output annotated.tsv
//   mwetag evaluate --config run.cfg
//
// Exit codes: 0 success, 2 bad input or configuration, 3 training failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mwetag/corpus.h"
#include "mwetag/embedio.h"
#include "mwetag/metrics.h"
#include "mwetag/run_config.h"
#include "mwetag/taggers.h"
#include "mwetag/tagscheme.h"

namespace mwetag {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitTraining = 3;

struct GlobalFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> exclude_ids;
  bool strict_iob = false;
  std::optional<std::string> scheme;
};

struct IoFlags {
  std::string model;
  std::string corpus;
  std::string embeddings;
  std::string report;
  std::string output;
};

RunConfig ResolveConfig(const GlobalFlags& flags) {
  RunConfig cfg;
  if (!flags.config_path.empty()) cfg = LoadRunConfig(flags.config_path);
  if (flags.seed) cfg.train.seed = *flags.seed;
  for (const auto& id : flags.exclude_ids) {
    for (auto& part : SplitList(id)) cfg.exclude_ids.push_back(part);
  }
  if (flags.strict_iob) cfg.strict_iob = true;
  if (flags.scheme) cfg.train.scheme = ParseSchemeMode(*flags.scheme);
  return cfg;
}

void RequireFile(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is not set");
  if (!std::filesystem::exists(path)) {
    throw ConfigError(what + " '" + path + "' does not exist");
  }
}

void CheckScheme(const Corpus& corpus, const RunConfig& cfg) {
  if (!cfg.strict_iob) return;
  for (const auto& sentence : corpus.sentences) {
    const auto violations = Validate(sentence.labels, cfg.train.scheme);
    if (!violations.empty()) {
      throw Error("sentence '" + sentence.id + "' violates " +
                  std::string(SchemeModeName(cfg.train.scheme)) + " at token " +
                  std::to_string(violations[0].position + 1) + ": " +
                  violations[0].reason);
    }
  }
}

// Loads embeddings for `corpus` and keeps only sentences not excluded.
JoinedDataset JoinFiltered(const Corpus& corpus, const std::string& path,
                           const std::vector<std::string>& exclude_ids) {
  const EmbeddingFile file = ReadEmbeddingsFile(path);
  JoinedDataset joined = Join(corpus, file);
  if (joined.missing > 0) {
    std::cerr << "warning: " << joined.missing
              << " sentence(s) have no embeddings and are skipped\n";
  }
  std::erase_if(joined.sentences, [&](const AlignedSentence& s) {
    return std::find(exclude_ids.begin(), exclude_ids.end(), s.sentence->id) !=
           exclude_ids.end();
  });
  return joined;
}

int CmdStats(const std::string& path, const RunConfig& cfg) {
  RequireFile(path, "corpus");
  const Corpus corpus =
      ExcludeSentences(ParseDimsumFile(path), cfg.exclude_ids);
  CheckScheme(corpus, cfg);
  const CorpusStats stats = ComputeStats(corpus);
  std::cout << path << ": " << stats.num_sentences << " sentences, "
            << stats.num_tokens << " tokens\n";
  std::cout << "labels:";
  for (Label l : kAllLabels) {
    std::cout << ' ' << LabelName(l) << '='
              << stats.label_histogram[LabelIndex(l)];
  }
  std::cout << '\n';
  return kExitOk;
}

int CmdTrain(const RunConfig& cfg) {
  RequireFile(cfg.train_file, "train_file");
  if (cfg.model_file.empty()) throw ConfigError("model_file is not set");
  if (cfg.train.model_kind == ModelKind::kLinearHead) {
    RequireFile(cfg.embeddings_file, "embeddings_file (needed by linear_head)");
  }
  const Corpus full = ParseDimsumFile(cfg.train_file);
  const Corpus corpus = ExcludeSentences(full, cfg.exclude_ids);
  CheckScheme(corpus, cfg);

  auto log = [](int epoch, double loss) {
    std::cerr << "epoch " << epoch << " mean_loss " << loss << '\n';
  };
  TrainResult result;
  if (cfg.train.model_kind == ModelKind::kBilstmCrf) {
    result = TrainBilstmCrf(corpus, cfg.train, log);
  } else {
    const JoinedDataset data =
        JoinFiltered(full, cfg.embeddings_file, cfg.exclude_ids);
    result = TrainLinearHead(data, cfg.train, log);
  }

  SaveModelFile(result.model, cfg.model_file);
  std::ofstream trace(cfg.loss_trace_file);
  if (!trace)
    throw Error("cannot write loss trace '" + cfg.loss_trace_file + "'");
  for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
    char line[64];
    std::snprintf(line, sizeof(line), "%zu\t%.12g\n", e + 1,
                  result.loss_trace[e]);
    trace << line;
  }
  std::cout << "wrote " << cfg.model_file << " (" << result.loss_trace.size()
            << " epochs, final mean loss " << result.loss_trace.back() << ")\n";
  return kExitOk;
}

// Predictions for every sentence of `corpus`, in corpus order. Linear heads
// need embeddings; sentences without them yield nullopt.
std::vector<std::optional<LabelSequence>> PredictAll(
    const TaggerModel& model, const Corpus& corpus,
    const std::string& embeddings_path) {
  std::vector<std::optional<LabelSequence>> out(corpus.sentences.size());
  if (model.kind() == ModelKind::kBilstmCrf) {
    for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
      out[s] = Predict(model, corpus.sentences[s]);
    }
    return out;
  }
  RequireFile(embeddings_path, "embeddings for the linear_head model");
  const JoinedDataset joined =
      Join(corpus, ReadEmbeddingsFile(embeddings_path));
  for (const auto& aligned : joined.sentences) {
    out[aligned.corpus_index] =
        Predict(model, *aligned.sentence, aligned.vectors);
  }
  return out;
}

int CmdEvaluate(const RunConfig& cfg, const IoFlags& io) {
  const std::string model_path = io.model.empty() ? cfg.model_file : io.model;
  const std::string corpus_path = io.corpus.empty() ? cfg.test_file : io.corpus;
  const std::string emb_path =
      io.embeddings.empty() ? cfg.test_embeddings_file : io.embeddings;
  const std::string report_path =
      io.report.empty() ? cfg.report_file : io.report;
  RequireFile(model_path, "model file");
  RequireFile(corpus_path, "test corpus");

  const TaggerModel model = LoadModelFile(model_path);
  const Corpus corpus = ParseDimsumFile(corpus_path);
  CheckScheme(ExcludeSentences(corpus, cfg.exclude_ids), cfg);
  const auto predictions = PredictAll(model, corpus, emb_path);

  std::vector<LabelSequence> gold;
  std::vector<LabelSequence> predicted;
  std::size_t skipped = 0;
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    const Sentence& sentence = corpus.sentences[s];
    if (std::find(cfg.exclude_ids.begin(), cfg.exclude_ids.end(),
                  sentence.id) != cfg.exclude_ids.end()) {
      continue;
    }
    if (!predictions[s]) {
      ++skipped;
      continue;
    }
    gold.push_back(sentence.labels);
    predicted.push_back(*predictions[s]);
  }
  if (skipped > 0) {
    std::cerr << "warning: " << skipped
              << " sentence(s) have no embeddings and are not scored\n";
  }

  const EvalReport report = EvaluateTokens(gold, predicted);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw Error("cannot write report '" + report_path + "'");
    out << ReportToJson(report) << '\n';
  }
  const SpanScores spans = EvaluateSpans(gold, predicted, cfg.train.scheme);
  std::cout << ReportSummary(report) << '\n';
  std::fprintf(stderr, "spans (%s): precision=%.6f recall=%.6f f1=%.6f\n",
               std::string(SchemeModeName(cfg.train.scheme)).c_str(),
               spans.precision, spans.recall, spans.f1);
  return kExitOk;
}

// Rewrites the MWE tag column of every token line, leaving all other bytes
// untouched.
int CmdPredict(const RunConfig& cfg, const IoFlags& io) {
  const std::string model_path = io.model.empty() ? cfg.model_file : io.model;
  const std::string corpus_path = io.corpus.empty() ? cfg.test_file : io.corpus;
  const std::string emb_path =
      io.embeddings.empty() ? cfg.test_embeddings_file : io.embeddings;
  RequireFile(model_path, "model file");
  RequireFile(corpus_path, "corpus");
  if (io.output.empty()) throw ConfigError("--output is required");

  const TaggerModel model = LoadModelFile(model_path);
  const Corpus corpus = ParseDimsumFile(corpus_path);
  const auto predictions = PredictAll(model, corpus, emb_path);
  for (std::size_t s = 0; s < predictions.size(); ++s) {
    if (!predictions[s]) {
      throw Error("no embeddings for sentence '" + corpus.sentences[s].id +
                  "'");
    }
  }

  std::ifstream in(corpus_path, std::ios::binary);
  const std::string text{std::istreambuf_iterator<char>(in),
                         std::istreambuf_iterator<char>()};
  std::string out;
  out.reserve(text.size());
  std::size_t sentence = 0, token = 0;
  bool in_sentence = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    const bool has_newline = end != std::string::npos;
    if (!has_newline) end = text.size();
    const std::string_view line(text.data() + pos, end - pos);
    if (line.find_first_not_of(" \t\r\f\v") == std::string_view::npos) {
      if (in_sentence) {
        ++sentence;
        token = 0;
        in_sentence = false;
      }
      out.append(line);
    } else {
      in_sentence = true;
      // Column 5 sits between the 4th and 5th tabs (or line end).
      std::size_t tab = 0;
      for (int k = 0; k < 4; ++k) tab = line.find('\t', k == 0 ? 0 : tab + 1);
      const std::size_t start = tab + 1;
      std::size_t stop = line.find('\t', start);
      if (stop == std::string_view::npos) {
        stop = line.size();
        if (stop > start && line[stop - 1] == '\r') --stop;
      }
      out.append(line.substr(0, start));
      out.push_back(LabelChar((*predictions[sentence])[token++]));
      out.append(line.substr(stop));
    }
    if (has_newline) out.push_back('\n');
    pos = end + 1;
  }

  std::ofstream file(io.output, std::ios::binary);
  if (!file) throw Error("cannot write '" + io.output + "'");
  file << out;
  std::cout << "wrote " << io.output << " (" << corpus.num_sentences()
            << " sentences)\n";
  return kExitOk;
}

int Run(int argc, char** argv) {
  CLI::App app{"Multiword-expression tagging toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags flags;
  IoFlags io;
  std::string stats_path;
  app.add_option("--config", flags.config_path, "Run configuration file");
  app.add_option("--seed", flags.seed, "Override the configured seed");
  app.add_option("--exclude-ids", flags.exclude_ids,
                 "Sentence ids to drop (comma-separated or repeated)");
  app.add_flag("--strict-iob", flags.strict_iob,
               "Reject corpora whose tags violate the scheme");
  app.add_option("--scheme", flags.scheme, "Tag scheme: iob1 or iob2")
      ->check(CLI::IsMember({"iob1", "iob2"}));

  auto* stats = app.add_subcommand("stats", "Print corpus statistics");
  stats->add_option("corpus", stats_path, "Corpus file")->required();
  auto* train = app.add_subcommand("train", "Train a model from --config");
  auto* predict = app.add_subcommand("predict", "Tag a corpus");
  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a corpus");
  for (auto* sub : {predict, evaluate}) {
    sub->add_option("--model", io.model, "Model file (default: model_file)");
    sub->add_option("--corpus", io.corpus, "Corpus (default: test_file)");
    sub->add_option("--embeddings", io.embeddings,
                    "Embeddings for the corpus (linear_head models)");
  }
  predict->add_option("--output", io.output, "Annotated output file")
      ->required();
  evaluate->add_option("--report", io.report, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    const RunConfig cfg = ResolveConfig(flags);
    if (*stats) return CmdStats(stats_path, cfg);
    if (*train) {
      if (flags.config_path.empty()) throw ConfigError("train needs --config");
      return CmdTrain(cfg);
    }
    if (*predict) return CmdPredict(cfg, io);
    if (*evaluate) return CmdEvaluate(cfg, io);
  } catch (const NonFiniteLoss& e) {
    std::cerr << "error: training aborted: " << e.what() << '\n';
    return kExitTraining;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace
}  // namespace mwetag

int main(int argc, char** argv) { return mwetag::Run(argc, argv); }
