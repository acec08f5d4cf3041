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

#include "mwetag/taggers.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"

namespace mwetag {
namespace {

Sentence MakeSentence(const std::vector<std::string>& words,
                      const LabelSequence& labels, std::string id = "s") {
  Sentence s;
  s.id = std::move(id);
  for (std::size_t t = 0; t < words.size(); ++t) {
    Token tok;
    tok.offset = static_cast<int>(t) + 1;
    tok.word = words[t];
    tok.mwe_tag_raw = std::string(1, LabelChar(labels[t]));
    s.tokens.push_back(tok);
  }
  s.labels = labels;
  return s;
}

Sentence MemorizeMe() {
  using enum Label;
  return MakeSentence(
      {"He", "took", "a", "look", "at", "the", "kick", "off", "."},
      {kO, kB, kI, kI, kO, kO, kB, kI, kO});
}

TrainConfig SmallBilstm(int epochs, std::uint64_t seed = 1) {
  TrainConfig c = TrainConfig::BilstmCrfDefaults();
  c.epochs = epochs;
  c.hidden_size = 8;
  c.embed_dim = 6;
  c.seed = seed;
  return c;
}

Corpus TenSentences() {
  return ParseDimsumFile(MWETAG_TEST_DATA "/ten_sentences.tsv");
}

std::string Serialize(const TaggerModel& m) {
  std::ostringstream out;
  SaveModel(m, out);
  return out.str();
}

TaggerModel Deserialize(const std::string& bytes) {
  std::istringstream in(bytes);
  return LoadModel(in);
}

Sentence RandomSentence(std::mt19937_64& rng, const Vocabulary& vocab) {
  std::uniform_int_distribution<int> length(1, 30);
  std::uniform_int_distribution<int> pick(0, vocab.size() - 1);
  std::bernoulli_distribution unknown(0.2);
  const int n = length(rng);
  std::vector<std::string> words;
  for (int t = 0; t < n; ++t) {
    words.push_back(unknown(rng)
                        ? "zzq" + std::to_string(t)
                        : vocab.words()[static_cast<std::size_t>(pick(rng))]);
  }
  return MakeSentence(words,
                      LabelSequence(static_cast<std::size_t>(n), Label::kO));
}

TEST_CASE("BiLSTM-CRF memorizes a single sentence") {
  Corpus corpus;
  corpus.sentences.push_back(MemorizeMe());
  TrainConfig config = TrainConfig::BilstmCrfDefaults();
  config.epochs = 200;
  config.learning_rate = 0.1;
  const TrainResult result = TrainBilstmCrf(corpus, config);
  REQUIRE(result.loss_trace.size() == 200);
  CHECK(result.loss_trace.back() < 0.01);
  const double nll = BilstmCrfLoss(result.model, corpus.sentences[0]);
  CHECK(nll / 9 < 0.01);
  CHECK(Predict(result.model, corpus.sentences[0]) ==
        corpus.sentences[0].labels);
}

TEST_CASE("training is deterministic for a fixed seed") {
  const Corpus corpus = TenSentences();
  const TrainResult a = TrainBilstmCrf(corpus, SmallBilstm(5, 9));
  const TrainResult b = TrainBilstmCrf(corpus, SmallBilstm(5, 9));
  const TrainResult c = TrainBilstmCrf(corpus, SmallBilstm(5, 10));
  CHECK(a.loss_trace == b.loss_trace);
  CHECK(Serialize(a.model) == Serialize(b.model));
  CHECK(Serialize(a.model) != Serialize(c.model));
}

TEST_CASE("mean loss falls over 50 epochs on ten sentences") {
  const Corpus corpus = TenSentences();
  REQUIRE(corpus.sentences.size() == 10);
  std::vector<double> seen;
  const TrainResult r = TrainBilstmCrf(
      corpus, TrainConfig::BilstmCrfDefaults(), [&](int epoch, double loss) {
        CHECK(epoch == static_cast<int>(seen.size()) + 1);
        seen.push_back(loss);
      });
  REQUIRE(r.loss_trace.size() == 50);
  CHECK(seen == r.loss_trace);
  for (double l : r.loss_trace) CHECK(std::isfinite(l));
  CHECK(r.loss_trace.back() < r.loss_trace.front());
}

TEST_CASE("BiLSTM-CRF training errors") {
  CHECK_THROWS_AS(TrainBilstmCrf(Corpus{}, SmallBilstm(1)), EmptyCorpus);
  Corpus one;
  one.sentences.push_back(MemorizeMe());
  CHECK_THROWS_AS(TrainBilstmCrf(one, TrainConfig::LinearHeadDefaults()),
                  ModelKindMismatch);
  TrainConfig bad = SmallBilstm(1);
  bad.learning_rate = 0;
  CHECK_THROWS_AS(TrainBilstmCrf(one, bad), Error);

  TrainConfig explode = SmallBilstm(3);
  explode.learning_rate = 1e300;
  explode.clip_norm = 0;
  try {
    TrainBilstmCrf(one, explode);
    FAIL("expected NonFiniteLoss");
  } catch (const NonFiniteLoss& e) {
    CHECK(e.epoch() >= 1);
    CHECK(e.sentence() == 0);
  }
}

TEST_CASE("TrainConfig validation") {
  CHECK_NOTHROW(TrainConfig::BilstmCrfDefaults().Validate());
  CHECK_NOTHROW(TrainConfig::LinearHeadDefaults().Validate());
  auto expect_bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.Validate(), Error);
  };
  expect_bad([](TrainConfig& c) { c.learning_rate = -1; });
  expect_bad([](TrainConfig& c) { c.learning_rate = std::nan(""); });
  expect_bad([](TrainConfig& c) { c.epochs = 0; });
  expect_bad([](TrainConfig& c) { c.batch_size = 0; });
  expect_bad([](TrainConfig& c) { c.warmup_fraction = 1.5; });
  expect_bad([](TrainConfig& c) { c.hidden_size = 0; });
  CHECK(ParseModelKind("linear_head") == ModelKind::kLinearHead);
  CHECK(ModelKindName(ModelKind::kBilstmCrf) == "bilstm_crf");
  CHECK(ParseLrSchedule("constant") == LrSchedule::kConstant);
  CHECK_THROWS_AS(ParseModelKind("crf"), Error);
}

TEST_CASE("vocabulary") {
  Corpus corpus;
  corpus.sentences.push_back(MakeSentence({"The", "cat", "the", "CAT", "Öl"},
                                          LabelSequence(5, Label::kO)));
  const Vocabulary v = Vocabulary::Build(corpus);
  CHECK(v.words() == std::vector<std::string>{"<unk>", "the", "cat", "Öl"});
  CHECK(v.Id("tHe") == 1);
  CHECK(v.Id("dog") == 0);
  CHECK(v.Ids(corpus.sentences[0]) == std::vector<int>{1, 2, 1, 2, 3});
  CHECK(Vocabulary::FromWords(v.words()) == v);
  CHECK_THROWS_AS(Vocabulary::FromWords({"the"}), CorruptPayload);
  CHECK_THROWS_AS(Vocabulary::FromWords({"<unk>", "a", "a"}), CorruptPayload);
  CHECK(LowercaseAscii("ÄbC") == "Äbc");
}

TEST_CASE("BiLSTM-CRF prediction length and model round trip") {
  const Corpus corpus = TenSentences();
  const TaggerModel model = TrainBilstmCrf(corpus, SmallBilstm(3)).model;
  const std::string bytes = Serialize(model);
  const TaggerModel loaded = Deserialize(bytes);
  CHECK(loaded.config == model.config);
  CHECK(loaded.vocab == model.vocab);
  CHECK(Serialize(loaded) == bytes);

  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 1000; ++trial) {
    const Sentence s = RandomSentence(rng, model.vocab);
    const LabelSequence labels = Predict(model, s);
    REQUIRE(labels.size() == s.size());
    for (Label l : labels) REQUIRE(LabelIndex(l) < kNumLabels);
    if (trial < 100) REQUIRE(Predict(loaded, s) == labels);
  }

  CHECK_THROWS_AS(Predict(model, corpus.sentences[0], Matrix::Zero(3, 4)),
                  ModelKindMismatch);
}

TEST_CASE("model files reject corruption") {
  Corpus one;
  one.sentences.push_back(MemorizeMe());
  const std::string bytes =
      Serialize(TrainBilstmCrf(one, SmallBilstm(1)).model);
  for (std::size_t n :
       {std::size_t{8}, std::size_t{20}, bytes.size() / 2, bytes.size() - 1}) {
    CHECK_THROWS_AS(Deserialize(bytes.substr(0, n)), CorruptPayload);
  }
  CHECK_THROWS_AS(Deserialize("NOPE" + bytes.substr(4)), BadMagic);
  std::string future = bytes;
  future[4] = 7;
  CHECK_THROWS_AS(Deserialize(future), VersionUnsupported);

  // A valid container whose header is not a model.
  std::ostringstream out;
  WriteParamBlob(out, "{\"format\": \"other\"}", {});
  CHECK_THROWS_AS(Deserialize(out.str()), CorruptPayload);
  std::ostringstream garbage;
  WriteParamBlob(garbage, "not json", {});
  CHECK_THROWS_AS(Deserialize(garbage.str()), CorruptPayload);
}

// Three labelled clusters around scaled one-hot centres.
JoinedDataset Clusters(const Corpus& corpus, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.1);
  JoinedDataset d;
  d.dim = static_cast<std::size_t>(dim);
  for (std::size_t k = 0; k < corpus.sentences.size(); ++k) {
    const Sentence& s = corpus.sentences[k];
    Matrix v(static_cast<Eigen::Index>(s.size()), dim);
    for (std::size_t t = 0; t < s.size(); ++t) {
      for (int j = 0; j < dim; ++j) {
        v(static_cast<Eigen::Index>(t), j) =
            (j == LabelIndex(s.labels[t]) ? 5.0 : 0.0) + noise(rng);
      }
    }
    d.sentences.push_back({k, &s, std::move(v)});
  }
  return d;
}

Corpus RandomLabelCorpus(int sentences, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(1, 12), label(0, 2);
  Corpus c;
  for (int k = 0; k < sentences; ++k) {
    const int n = length(rng);
    std::vector<std::string> words;
    LabelSequence labels;
    for (int t = 0; t < n; ++t) {
      words.push_back("w");
      labels.push_back(LabelFromIndex(label(rng)));
    }
    c.sentences.push_back(MakeSentence(words, labels, std::to_string(k)));
  }
  return c;
}

TEST_CASE("zero-initialised linear head") {
  const Corpus corpus = RandomLabelCorpus(8, 71);
  const JoinedDataset data = Clusters(corpus, 5, 72);
  TrainConfig c = TrainConfig::LinearHeadDefaults();
  c.epochs = 1;  // all 8 sentences fit in one batch
  const TrainResult r = TrainLinearHead(data, c);
  REQUIRE(r.loss_trace.size() == 1);
  CHECK(std::abs(r.loss_trace[0] - std::log(3.0)) < 1e-12);

  TaggerModel zero;
  zero.config = TrainConfig::LinearHeadDefaults();
  zero.net = LinearHead{nn::LinearParams::Zeros(5, kNumLabels)};
  for (const auto& s : data.sentences) {
    CHECK(Predict(zero, *s.sentence, s.vectors) ==
          LabelSequence(s.sentence->size(), Label::kB));
  }
}

TEST_CASE("linear head separates three clusters with the default recipe") {
  const Corpus corpus = RandomLabelCorpus(320, 73);
  const JoinedDataset data = Clusters(corpus, 3, 74);
  const TrainResult r =
      TrainLinearHead(data, TrainConfig::LinearHeadDefaults());
  REQUIRE(r.loss_trace.size() == 3);
  std::size_t correct = 0, total = 0;
  for (const auto& s : data.sentences) {
    const LabelSequence p = Predict(r.model, *s.sentence, s.vectors);
    for (std::size_t t = 0; t < p.size(); ++t) {
      correct += p[t] == s.sentence->labels[t];
      ++total;
    }
  }
  CHECK(correct == total);
  CHECK(r.loss_trace.back() < r.loss_trace.front());

  const TaggerModel loaded = Deserialize(Serialize(r.model));
  CHECK(std::get<LinearHead>(loaded.net).head.w ==
        std::get<LinearHead>(r.model.net).head.w);
  CHECK(Serialize(
            TrainLinearHead(data, TrainConfig::LinearHeadDefaults()).model) ==
        Serialize(r.model));
  for (const auto& s : data.sentences) {
    REQUIRE(Predict(loaded, *s.sentence, s.vectors) ==
            Predict(r.model, *s.sentence, s.vectors));
  }
  CHECK_THROWS_AS(Predict(loaded, *data.sentences[0].sentence,
                          Matrix::Zero(data.sentences[0].vectors.rows(), 4)),
                  DimMismatch);
  CHECK_THROWS_AS(Predict(loaded, *data.sentences[0].sentence),
                  ModelKindMismatch);
}

TEST_CASE("linear head training errors") {
  CHECK_THROWS_AS(
      TrainLinearHead(JoinedDataset{}, TrainConfig::LinearHeadDefaults()),
      EmptyDataset);
  const Corpus corpus = RandomLabelCorpus(2, 75);
  JoinedDataset data = Clusters(corpus, 3, 76);
  CHECK_THROWS_AS(TrainLinearHead(data, TrainConfig::BilstmCrfDefaults()),
                  ModelKindMismatch);
  data.sentences[1].vectors = Matrix::Zero(data.sentences[1].vectors.rows(), 4);
  CHECK_THROWS_AS(TrainLinearHead(data, TrainConfig::LinearHeadDefaults()),
                  DimMismatch);
}

TEST_CASE("warmup and decay schedule") {
  TrainConfig c = TrainConfig::LinearHeadDefaults();
  const std::int64_t total = 95;
  const std::int64_t warmup = WarmupSteps(c, total);
  CHECK(warmup == 10);
  CHECK(ScheduledLearningRate(c, warmup, total) == c.learning_rate);
  CHECK(ScheduledLearningRate(c, 1, total) ==
        doctest::Approx(c.learning_rate / 10));
  double previous = 0.0;
  for (std::int64_t s = 1; s <= total; ++s) {
    const double lr = ScheduledLearningRate(c, s, total);
    CHECK(lr > 0);
    CHECK(lr <= c.learning_rate);
    if (s <= warmup) CHECK(lr > previous);
    if (s > warmup) CHECK(lr < previous);
    previous = lr;
  }
  c.lr_schedule = LrSchedule::kConstant;
  CHECK(ScheduledLearningRate(c, total, total) == c.learning_rate);
  c.warmup_fraction = 0;
  CHECK(WarmupSteps(c, total) == 0);
  CHECK(ScheduledLearningRate(c, 1, total) == c.learning_rate);
}

}  // namespace
}  // namespace mwetag
