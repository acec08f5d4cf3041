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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"

namespace mwetag {
namespace {

using nlohmann::json;

constexpr std::string_view kModelFormat = "mwetag-model";

std::vector<int> ToPath(const LabelSequence& labels) {
  std::vector<int> path(labels.size());
  std::transform(labels.begin(), labels.end(), path.begin(), LabelIndex);
  return path;
}

LabelSequence FromPath(const std::vector<int>& path) {
  LabelSequence labels(path.size());
  std::transform(path.begin(), path.end(), labels.begin(), LabelFromIndex);
  return labels;
}

template <typename View>
std::vector<View> Concat(std::initializer_list<std::vector<View>> parts) {
  std::vector<View> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::vector<ConstTensorView> AsConst(const std::vector<TensorView>& views) {
  std::vector<ConstTensorView> out;
  out.reserve(views.size());
  for (const auto& v : views) out.push_back(mwetag::AsConst(v));
  return out;
}

json ConfigToJson(const TrainConfig& c) {
  return {{"model_kind", ModelKindName(c.model_kind)},
          {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"warmup_fraction", c.warmup_fraction},
          {"seed", c.seed},
          {"hidden_size", c.hidden_size},
          {"embed_dim", c.embed_dim},
          {"scheme", SchemeModeName(c.scheme)},
          {"clip_norm", c.clip_norm},
          {"lr_schedule", LrScheduleName(c.lr_schedule)},
          {"init_scale", c.init_scale}};
}

TrainConfig ConfigFromJson(const json& j) {
  TrainConfig c;
  c.model_kind = ParseModelKind(j.at("model_kind").get<std::string>());
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.warmup_fraction = j.at("warmup_fraction").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.hidden_size = j.at("hidden_size").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.scheme = ParseSchemeMode(j.at("scheme").get<std::string>());
  c.clip_norm = j.at("clip_norm").get<double>();
  c.lr_schedule = ParseLrSchedule(j.at("lr_schedule").get<std::string>());
  c.init_scale = j.at("init_scale").get<double>();
  return c;
}

void RequireKind(const TaggerModel& model, ModelKind kind) {
  if (model.kind() != kind) {
    throw ModelKindMismatch("operation needs a " +
                            std::string(ModelKindName(kind)) + " model, got " +
                            std::string(ModelKindName(model.kind())));
  }
}

// Softmax cross-entropy over each row of `logits`. Writes d(sum loss)/d
// logits into `grad` and returns the summed loss.
double SoftmaxCrossEntropy(const Matrix& logits, const std::vector<int>& gold,
                           Matrix& grad) {
  grad.resize(logits.rows(), logits.cols());
  double total = 0.0;
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double m = logits.row(t).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(t).array() - m).exp();
    const double z = e.sum();
    grad.row(t) = e / z;
    total += std::log(z) + m - logits(t, gold[t]);
    grad(t, gold[t]) -= 1.0;
  }
  return total;
}

}  // namespace

ModelKind ParseModelKind(std::string_view name) {
  if (name == "bilstm_crf") return ModelKind::kBilstmCrf;
  if (name == "linear_head") return ModelKind::kLinearHead;
  throw Error("unknown model kind '" + std::string(name) +
              "' (expected bilstm_crf or linear_head)");
}

std::string_view ModelKindName(ModelKind kind) {
  return kind == ModelKind::kBilstmCrf ? "bilstm_crf" : "linear_head";
}

LrSchedule ParseLrSchedule(std::string_view name) {
  if (name == "linear_decay") return LrSchedule::kLinearDecay;
  if (name == "constant") return LrSchedule::kConstant;
  throw Error("unknown lr schedule '" + std::string(name) +
              "' (expected linear_decay or constant)");
}

std::string_view LrScheduleName(LrSchedule schedule) {
  return schedule == LrSchedule::kLinearDecay ? "linear_decay" : "constant";
}

TrainConfig TrainConfig::BilstmCrfDefaults() { return TrainConfig{}; }

TrainConfig TrainConfig::LinearHeadDefaults() {
  TrainConfig c;
  c.model_kind = ModelKind::kLinearHead;
  c.learning_rate = 4e-5;
  c.epochs = 3;
  c.batch_size = 32;
  c.warmup_fraction = 0.1;
  c.clip_norm = 0.0;
  return c;
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    throw Error("learning_rate must be positive");
  }
  if (epochs < 1) throw Error("epochs must be >= 1");
  if (batch_size < 1) throw Error("batch_size must be >= 1");
  if (!(warmup_fraction >= 0 && warmup_fraction <= 1)) {
    throw Error("warmup_fraction must lie in [0, 1]");
  }
  if (hidden_size < 1) throw Error("hidden_size must be >= 1");
  if (embed_dim < 1) throw Error("embed_dim must be >= 1");
  if (!std::isfinite(clip_norm)) throw Error("clip_norm must be finite");
  if (!(init_scale >= 0) || !std::isfinite(init_scale)) {
    throw Error("init_scale must be non-negative");
  }
}

std::string LowercaseAscii(std::string_view word) {
  std::string out(word);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

Vocabulary::Vocabulary() : words_{std::string(kUnknown)} {
  index_.emplace(kUnknown, 0);
}

Vocabulary Vocabulary::Build(const Corpus& corpus) {
  Vocabulary vocab;
  for (const auto& sentence : corpus.sentences) {
    for (const auto& token : sentence.tokens) {
      auto word = LowercaseAscii(token.word);
      if (vocab.index_.contains(word)) continue;
      vocab.index_.emplace(word, vocab.size());
      vocab.words_.push_back(std::move(word));
    }
  }
  return vocab;
}

Vocabulary Vocabulary::FromWords(std::vector<std::string> words) {
  if (words.empty() || words.front() != kUnknown) {
    throw CorruptPayload("vocabulary must start with " + std::string(kUnknown));
  }
  Vocabulary vocab;
  vocab.words_ = std::move(words);
  vocab.index_.clear();
  for (int i = 0; i < vocab.size(); ++i) {
    if (!vocab.index_.emplace(vocab.words_[i], i).second) {
      throw CorruptPayload("duplicate vocabulary entry '" + vocab.words_[i] +
                           "'");
    }
  }
  return vocab;
}

int Vocabulary::Id(std::string_view word) const {
  const auto it = index_.find(LowercaseAscii(word));
  return it == index_.end() ? nn::EmbeddingTable::kUnkId : it->second;
}

std::vector<int> Vocabulary::Ids(const Sentence& sentence) const {
  std::vector<int> ids;
  ids.reserve(sentence.size());
  for (const auto& token : sentence.tokens) ids.push_back(Id(token.word));
  return ids;
}

BilstmCrfNet BilstmCrfNet::Zeros(int vocab_size, int embed_dim,
                                 int hidden_size) {
  BilstmCrfNet net;
  net.embeddings.vectors = Matrix::Zero(vocab_size, embed_dim);
  net.forward = nn::LstmCellParams::Zeros(embed_dim, hidden_size);
  net.backward = nn::LstmCellParams::Zeros(embed_dim, hidden_size);
  net.projection = nn::LinearParams::Zeros(2 * hidden_size, kNumLabels);
  net.crf = crf::CrfParams::Zeros(kNumLabels);
  return net;
}

std::vector<TensorView> BilstmCrfNet::Tensors() {
  return Concat<TensorView>(
      {embeddings.Tensors("embeddings."), forward.Tensors("lstm_forward."),
       backward.Tensors("lstm_backward."), projection.Tensors("projection."),
       crf.Tensors("crf.")});
}

std::vector<ConstTensorView> BilstmCrfNet::Tensors() const {
  return Concat<ConstTensorView>(
      {embeddings.Tensors("embeddings."), forward.Tensors("lstm_forward."),
       backward.Tensors("lstm_backward."), projection.Tensors("projection."),
       crf.Tensors("crf.")});
}

std::vector<TensorView> LinearHead::Tensors() { return head.Tensors("head."); }

std::vector<ConstTensorView> LinearHead::Tensors() const {
  return head.Tensors("head.");
}

std::vector<ConstTensorView> TaggerModel::Tensors() const {
  return std::visit([](const auto& n) { return n.Tensors(); }, net);
}

NonFiniteLoss::NonFiniteLoss(int epoch, std::size_t sentence, double loss)
    : Error("non-finite loss " + std::to_string(loss) + " at epoch " +
            std::to_string(epoch) + ", sentence " + std::to_string(sentence)),
      epoch_(epoch),
      sentence_(sentence) {}

crf::EmissionMatrix BilstmEmissions(const BilstmCrfNet& net,
                                    const std::vector<int>& ids) {
  const Matrix inputs = net.embeddings.Lookup(ids);
  const auto encoded = nn::BiLstmForward(net.forward, net.backward, inputs);
  return nn::LinearForward(net.projection, encoded.output);
}

double BilstmCrfLoss(const TaggerModel& model, const Sentence& sentence) {
  RequireKind(model, ModelKind::kBilstmCrf);
  const auto& net = std::get<BilstmCrfNet>(model.net);
  const auto emissions = BilstmEmissions(net, model.vocab.Ids(sentence));
  const auto gold = ToPath(sentence.labels);
  return crf::LogPartition(emissions, net.crf) -
         crf::PathScore(emissions, net.crf, gold);
}

TrainResult TrainBilstmCrf(const Corpus& corpus, const TrainConfig& config,
                           const EpochCallback& on_epoch) {
  config.Validate();
  if (config.model_kind != ModelKind::kBilstmCrf) {
    throw ModelKindMismatch("TrainBilstmCrf needs model_kind = bilstm_crf");
  }
  if (corpus.sentences.empty()) throw EmptyCorpus();

  std::mt19937_64 rng(config.seed);
  TrainResult result;
  TaggerModel& model = result.model;
  model.config = config;
  model.vocab = Vocabulary::Build(corpus);
  model.net = BilstmCrfNet::Zeros(model.vocab.size(), config.embed_dim,
                                  config.hidden_size);
  auto& net = std::get<BilstmCrfNet>(model.net);
  // CRF scores start at zero; everything else is drawn from the seed.
  nn::InitUniform(Concat<TensorView>(
                      {net.embeddings.Tensors("e"), net.forward.Tensors("f"),
                       net.backward.Tensors("b"), net.projection.Tensors("p")}),
                  config.init_scale, rng);

  std::vector<std::vector<int>> ids;
  std::vector<std::vector<int>> gold;
  std::size_t total_tokens = 0;
  for (const auto& s : corpus.sentences) {
    ids.push_back(model.vocab.Ids(s));
    gold.push_back(ToPath(s.labels));
    total_tokens += s.size();
  }

  std::vector<std::size_t> order(corpus.sentences.size());
  std::iota(order.begin(), order.end(), 0);
  const auto D = config.embed_dim;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (const std::size_t k : order) {
      const auto& sentence_ids = ids[k];
      const Matrix inputs = net.embeddings.Lookup(sentence_ids);
      auto encoded = nn::BiLstmForward(net.forward, net.backward, inputs);
      const Matrix emissions =
          nn::LinearForward(net.projection, encoded.output);
      auto crf_loss = crf::NllAndGrads(emissions, net.crf, gold[k]);
      if (!std::isfinite(crf_loss.loss)) {
        throw NonFiniteLoss(epoch, k, crf_loss.loss);
      }
      epoch_loss += crf_loss.loss;

      auto proj = nn::LinearBackward(net.projection, encoded.output,
                                     crf_loss.grad_emissions);
      auto lstm = nn::BiLstmBackward(net.forward, net.backward, encoded.cache,
                                     proj.inputs);

      // Embedding gradients only touch the rows this sentence uses.
      std::vector<int> rows(sentence_ids);
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      Matrix embedding_grad =
          Matrix::Zero(static_cast<Eigen::Index>(rows.size()), D);
      for (std::size_t t = 0; t < sentence_ids.size(); ++t) {
        const auto slot =
            std::lower_bound(rows.begin(), rows.end(), sentence_ids[t]) -
            rows.begin();
        embedding_grad.row(slot) +=
            lstm.inputs.row(static_cast<Eigen::Index>(t));
      }

      auto dense_params = Concat<TensorView>(
          {net.forward.Tensors("f."), net.backward.Tensors("b."),
           net.projection.Tensors("p."), net.crf.Tensors("c.")});
      auto dense_grads = Concat<TensorView>(
          {lstm.forward.Tensors("f."), lstm.backward.Tensors("b."),
           proj.params.Tensors("p."), crf_loss.grad_params.Tensors("c.")});
      auto all_grads = dense_grads;
      all_grads.push_back(View("e.rows", embedding_grad));
      nn::ClipByGlobalNorm(all_grads, config.clip_norm);

      nn::SgdStep(dense_params, AsConst(dense_grads), config.learning_rate);
      for (std::size_t r = 0; r < rows.size(); ++r) {
        net.embeddings.vectors.row(rows[r]) -=
            config.learning_rate *
            embedding_grad.row(static_cast<Eigen::Index>(r));
      }
    }
    const double mean = epoch_loss / static_cast<double>(total_tokens);
    result.loss_trace.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

std::int64_t WarmupSteps(const TrainConfig& config, std::int64_t total_steps) {
  return static_cast<std::int64_t>(
      std::ceil(config.warmup_fraction * static_cast<double>(total_steps)));
}

double ScheduledLearningRate(const TrainConfig& config, std::int64_t step,
                             std::int64_t total_steps) {
  const double base = config.learning_rate;
  const std::int64_t warmup = WarmupSteps(config, total_steps);
  if (step <= warmup) {
    return base * static_cast<double>(step) / static_cast<double>(warmup);
  }
  if (config.lr_schedule == LrSchedule::kConstant) return base;
  return base * static_cast<double>(total_steps - step + 1) /
         static_cast<double>(total_steps - warmup + 1);
}

TrainResult TrainLinearHead(const JoinedDataset& dataset,
                            const TrainConfig& config,
                            const EpochCallback& on_epoch) {
  config.Validate();
  if (config.model_kind != ModelKind::kLinearHead) {
    throw ModelKindMismatch("TrainLinearHead needs model_kind = linear_head");
  }
  if (dataset.sentences.empty()) throw EmptyDataset();
  const auto dim = static_cast<Eigen::Index>(dataset.dim);
  std::size_t total_tokens = 0;
  for (const auto& s : dataset.sentences) {
    if (s.vectors.cols() != dim) {
      throw DimMismatch("sentence " + std::to_string(s.corpus_index) +
                        " has embeddings of width " +
                        std::to_string(s.vectors.cols()) + ", dataset dim is " +
                        std::to_string(dim));
    }
    total_tokens += static_cast<std::size_t>(s.vectors.rows());
  }

  std::mt19937_64 rng(config.seed);
  TrainResult result;
  TaggerModel& model = result.model;
  model.config = config;
  model.net =
      LinearHead{nn::LinearParams::Zeros(static_cast<int>(dim), kNumLabels)};
  auto& head = std::get<LinearHead>(model.net).head;
  auto params = head.Tensors("head.");
  auto adam = nn::AdamState::For(params);

  const std::size_t n = dataset.sentences.size();
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  const std::int64_t batches_per_epoch =
      static_cast<std::int64_t>((n + batch - 1) / batch);
  const std::int64_t total_steps = batches_per_epoch * config.epochs;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::int64_t step = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t begin = 0; begin < n; begin += batch) {
      const std::size_t end = std::min(n, begin + batch);
      Eigen::Index rows = 0;
      for (std::size_t k = begin; k < end; ++k) {
        rows += dataset.sentences[order[k]].vectors.rows();
      }
      Matrix inputs(rows, dim);
      std::vector<int> gold;
      gold.reserve(static_cast<std::size_t>(rows));
      Eigen::Index r = 0;
      for (std::size_t k = begin; k < end; ++k) {
        const auto& s = dataset.sentences[order[k]];
        inputs.middleRows(r, s.vectors.rows()) = s.vectors;
        r += s.vectors.rows();
        for (Label l : s.sentence->labels) gold.push_back(LabelIndex(l));
      }
      ++step;
      if (rows == 0) continue;

      const Matrix logits = nn::LinearForward(head, inputs);
      Matrix grad_logits;
      const double loss = SoftmaxCrossEntropy(logits, gold, grad_logits);
      if (!std::isfinite(loss)) throw NonFiniteLoss(epoch, begin, loss);
      epoch_loss += loss;
      grad_logits /= static_cast<double>(rows);  // mean over batch tokens

      auto grads = nn::LinearBackward(head, inputs, grad_logits);
      auto grad_views = grads.params.Tensors("head.");
      if (config.clip_norm > 0)
        nn::ClipByGlobalNorm(grad_views, config.clip_norm);
      nn::AdamStep(params, AsConst(grad_views), adam,
                   ScheduledLearningRate(config, step, total_steps));
    }
    const double mean = total_tokens == 0
                            ? 0.0
                            : epoch_loss / static_cast<double>(total_tokens);
    result.loss_trace.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

LabelSequence Predict(const TaggerModel& model, const Sentence& sentence) {
  RequireKind(model, ModelKind::kBilstmCrf);
  const auto& net = std::get<BilstmCrfNet>(model.net);
  const auto emissions = BilstmEmissions(net, model.vocab.Ids(sentence));
  return FromPath(crf::Viterbi(emissions, net.crf).path);
}

LabelSequence Predict(const TaggerModel& model, const Sentence& sentence,
                      const Matrix& vectors) {
  RequireKind(model, ModelKind::kLinearHead);
  const auto& head = std::get<LinearHead>(model.net).head;
  if (vectors.cols() != head.w.cols()) {
    throw DimMismatch("embeddings have width " +
                      std::to_string(vectors.cols()) + ", model expects " +
                      std::to_string(head.w.cols()));
  }
  if (static_cast<std::size_t>(vectors.rows()) != sentence.size()) {
    throw DimMismatch("sentence has " + std::to_string(sentence.size()) +
                      " tokens but " + std::to_string(vectors.rows()) +
                      " embedding rows");
  }
  const Matrix logits = nn::LinearForward(head, vectors);
  LabelSequence labels(sentence.size());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    int best = 0;
    for (int c = 1; c < kNumLabels; ++c) {
      if (logits(t, c) > logits(t, best)) best = c;
    }
    labels[static_cast<std::size_t>(t)] = LabelFromIndex(best);
  }
  return labels;
}

void SaveModel(const TaggerModel& model, std::ostream& out) {
  json header = {{"format", kModelFormat},
                 {"model_kind", ModelKindName(model.kind())},
                 {"config", ConfigToJson(model.config)},
                 {"vocabulary", model.vocab.words()}};
  if (const auto* head = std::get_if<LinearHead>(&model.net)) {
    header["input_dim"] = head->head.input_size();
  }
  WriteParamBlob(out, header.dump(), model.Tensors());
}

TaggerModel LoadModel(std::istream& in) {
  const ParamBlob blob = ReadParamBlob(in);
  TaggerModel model;
  try {
    const json header = json::parse(blob.header);
    if (header.at("format").get<std::string>() != kModelFormat) {
      throw CorruptPayload("parameter file is not a tagger model");
    }
    model.config = ConfigFromJson(header.at("config"));
    if (ParseModelKind(header.at("model_kind").get<std::string>()) !=
        model.config.model_kind) {
      throw CorruptPayload("model kind disagrees with its configuration");
    }
    model.config.Validate();
    model.vocab = Vocabulary::FromWords(
        header.at("vocabulary").get<std::vector<std::string>>());
    if (model.kind() == ModelKind::kBilstmCrf) {
      model.net = BilstmCrfNet::Zeros(
          model.vocab.size(), model.config.embed_dim, model.config.hidden_size);
    } else {
      const int dim = header.at("input_dim").get<int>();
      if (dim < 1) throw CorruptPayload("linear head input_dim must be >= 1");
      model.net = LinearHead{nn::LinearParams::Zeros(dim, kNumLabels)};
    }
  } catch (const json::exception& e) {
    throw CorruptPayload(std::string("bad model header: ") + e.what());
  } catch (const CorruptPayload&) {
    throw;
  } catch (const Error& e) {
    throw CorruptPayload(std::string("bad model header: ") + e.what());
  }
  auto tensors = std::visit([](auto& n) { return n.Tensors(); }, model.net);
  if (tensors.size() != blob.tensors.size()) {
    throw CorruptPayload(
        "model file has " + std::to_string(blob.tensors.size()) +
        " tensors, expected " + std::to_string(tensors.size()));
  }
  for (const auto& t : tensors) RestoreTensor(blob, t);
  return model;
}

void SaveModelFile(const TaggerModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot create model file '" + path + "'");
  SaveModel(model, out);
}

TaggerModel LoadModelFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file '" + path + "'");
  return LoadModel(in);
}

}  // namespace mwetag
