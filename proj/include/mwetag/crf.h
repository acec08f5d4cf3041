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

// Linear-chain CRF over per-token emission scores.
//
// The score of a label path y_1..y_T is
//
//   start[y_1] + sum_t emissions(t, y_t) + sum_{t>1} transitions(y_{t-1}, y_t)
//              + end[y_T]
//
// and the model distribution is exp(score - log Z). Everything runs in
// double precision and in log space.

#ifndef MWETAG_CRF_H_
#define MWETAG_CRF_H_

#include <span>
#include <vector>

#include "mwetag/error.h"
#include "mwetag/tensor.h"

namespace mwetag::crf {

// T x L matrix of unnormalized log-potentials, one row per token.
using EmissionMatrix = Matrix;

// Label paths are plain class indices so the CRF works for any alphabet
// size; taggers convert to and from Label.
using LabelPath = std::vector<int>;

struct CrfParams {
  Matrix transitions;  // (from, to), L x L
  Vector start;        // L
  Vector end;          // L

  static CrfParams Zeros(int num_labels);
  int num_labels() const { return static_cast<int>(start.size()); }

  std::vector<TensorView> Tensors(const std::string& prefix);
  std::vector<ConstTensorView> Tensors(const std::string& prefix) const;
};

struct CrfLoss {
  double loss = 0.0;
  EmissionMatrix grad_emissions;
  CrfParams grad_params;
};

struct ViterbiResult {
  LabelPath path;
  double score = 0.0;
};

double LogPartition(const EmissionMatrix& emissions, const CrfParams& params);

double PathScore(const EmissionMatrix& emissions, const CrfParams& params,
                 std::span<const int> path);

// Negative log-likelihood of `gold` and its gradients, from forward-backward
// marginals: d/d emissions(t,l) = P(y_t = l) - [gold_t = l], and the
// transition/start/end gradients likewise from pairwise and boundary
// marginals.
CrfLoss NllAndGrads(const EmissionMatrix& emissions, const CrfParams& params,
                    std::span<const int> gold);

// Highest-scoring path. Ties go to the lowest label index.
ViterbiResult Viterbi(const EmissionMatrix& emissions, const CrfParams& params);

// T x L per-position marginals P(y_t = l).
Matrix Marginals(const EmissionMatrix& emissions, const CrfParams& params);

}  // namespace mwetag::crf

#endif  // MWETAG_CRF_H_
