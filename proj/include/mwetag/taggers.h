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

// The two trainable taggers:
//
//  * BiLSTM-CRF: word embeddings -> BiLSTM -> linear emissions -> CRF,
//    trained from scratch with per-sentence SGD on the CRF likelihood.
//  * Linear head: a single affine map from frozen contextual embeddings to
//    three logits, trained with Adam on token-level cross-entropy.

#ifndef MWETAG_TAGGERS_H_
#define MWETAG_TAGGERS_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "mwetag/corpus.h"
#include "mwetag/crf.h"
#include "mwetag/embedio.h"
#include "mwetag/error.h"
#include "mwetag/neuralnet.h"
#include "mwetag/param_io.h"
#include "mwetag/tagscheme.h"

namespace mwetag {

enum class ModelKind { kBilstmCrf, kLinearHead };
enum class LrSchedule { kLinearDecay, kConstant };

ModelKind ParseModelKind(std::string_view name);
std::string_view ModelKindName(ModelKind kind);
LrSchedule ParseLrSchedule(std::string_view name);
std::string_view LrScheduleName(LrSchedule schedule);

struct TrainConfig {
  ModelKind model_kind = ModelKind::kBilstmCrf;
  double learning_rate = 0.15;
  int epochs = 50;
  int batch_size = 1;
  double warmup_fraction = 0.0;
  std::uint64_t seed = 1;
  int hidden_size = 200;  // per direction
  int embed_dim = 100;
  SchemeMode scheme = SchemeMode::kIob2;
  double clip_norm = 5.0;  // <= 0 disables clipping
  LrSchedule lr_schedule = LrSchedule::kLinearDecay;
  double init_scale = 0.1;  // U(-s, s) for embeddings and dense weights

  static TrainConfig BilstmCrfDefaults();
  static TrainConfig LinearHeadDefaults();

  // Throws Error naming the first bad field.
  void Validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Lowercased training words. Id 0 is the unknown word.
class Vocabulary {
 public:
  static constexpr std::string_view kUnknown = "<unk>";

  Vocabulary();
  static Vocabulary Build(const Corpus& corpus);
  static Vocabulary FromWords(std::vector<std::string> words);

  int Id(std::string_view word) const;
  std::vector<int> Ids(const Sentence& sentence) const;
  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }

  bool operator==(const Vocabulary& o) const { return words_ == o.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

std::string LowercaseAscii(std::string_view word);

struct BilstmCrfNet {
  nn::EmbeddingTable embeddings;
  nn::LstmCellParams forward;
  nn::LstmCellParams backward;
  nn::LinearParams projection;  // 2H -> 3
  crf::CrfParams crf;

  static BilstmCrfNet Zeros(int vocab_size, int embed_dim, int hidden_size);
  std::vector<TensorView> Tensors();
  std::vector<ConstTensorView> Tensors() const;
};

struct LinearHead {
  nn::LinearParams head;  // dim -> 3

  std::vector<TensorView> Tensors();
  std::vector<ConstTensorView> Tensors() const;
};

struct TaggerModel {
  TrainConfig config;
  Vocabulary vocab;  // empty except for <unk> on linear heads
  std::variant<BilstmCrfNet, LinearHead> net;

  ModelKind kind() const { return config.model_kind; }
  std::vector<ConstTensorView> Tensors() const;
};

struct TrainResult {
  TaggerModel model;
  std::vector<double> loss_trace;  // mean per-token loss, one per epoch
};

// Called after each epoch with the 1-based epoch number and its mean loss.
using EpochCallback = std::function<void(int epoch, double mean_loss)>;

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("training corpus has no sentences") {}
};

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("training dataset has no sentences") {}
};

class DimMismatch : public Error {
 public:
  using Error::Error;
};

class ModelKindMismatch : public Error {
 public:
  using Error::Error;
};

class NonFiniteLoss : public Error {
 public:
  NonFiniteLoss(int epoch, std::size_t sentence, double loss);
  int epoch() const { return epoch_; }
  std::size_t sentence() const { return sentence_; }

 private:
  int epoch_;
  std::size_t sentence_;
};

TrainResult TrainBilstmCrf(const Corpus& corpus, const TrainConfig& config,
                           const EpochCallback& on_epoch = {});

TrainResult TrainLinearHead(const JoinedDataset& dataset,
                            const TrainConfig& config,
                            const EpochCallback& on_epoch = {});

// Learning rate of the linear head's optimizer at 1-based step `step` of
// `total_steps`: linear ramp to the base rate over the warmup steps, then
// either constant or linear decay that stays positive on the last step.
double ScheduledLearningRate(const TrainConfig& config, std::int64_t step,
                             std::int64_t total_steps);
std::int64_t WarmupSteps(const TrainConfig& config, std::int64_t total_steps);

// Emission scores the BiLSTM-CRF feeds to its CRF, T x 3.
crf::EmissionMatrix BilstmEmissions(const BilstmCrfNet& net,
                                    const std::vector<int>& ids);

// CRF negative log-likelihood of the sentence's gold labels.
double BilstmCrfLoss(const TaggerModel& model, const Sentence& sentence);

// BiLSTM-CRF models decode with Viterbi.
LabelSequence Predict(const TaggerModel& model, const Sentence& sentence);
// Linear heads take each token's argmax; ties go to the lowest label.
LabelSequence Predict(const TaggerModel& model, const Sentence& sentence,
                      const Matrix& vectors);

// Model files are MWEP containers whose header is a JSON document holding
// the model kind, the training configuration and the vocabulary.
void SaveModel(const TaggerModel& model, std::ostream& out);
TaggerModel LoadModel(std::istream& in);
void SaveModelFile(const TaggerModel& model, const std::string& path);
TaggerModel LoadModelFile(const std::string& path);

}  // namespace mwetag

#endif  // MWETAG_TAGGERS_H_
