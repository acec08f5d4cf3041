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

// Dense layers with hand-derived gradients: embedding lookup, LSTM cell,
// bidirectional encoder and affine projection, plus SGD and Adam.
//
// Sequences are T x D matrices with one row per time step.

#ifndef MWETAG_NEURALNET_H_
#define MWETAG_NEURALNET_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mwetag/error.h"
#include "mwetag/tensor.h"

namespace mwetag::nn {

class StaleCache : public Error {
 public:
  using Error::Error;
};

// Row 0 is the unknown-word vector.
struct EmbeddingTable {
  static constexpr int kUnkId = 0;

  Matrix vectors;  // V x D

  int vocab_size() const { return static_cast<int>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }
  Matrix Lookup(std::span<const int> ids) const;

  std::vector<TensorView> Tensors(const std::string& prefix);
  std::vector<ConstTensorView> Tensors(const std::string& prefix) const;
};

// Gate blocks are stacked in the order input, forget, cell, output.
struct LstmCellParams {
  Matrix w;  // 4H x D
  Matrix u;  // 4H x H
  Vector b;  // 4H

  static LstmCellParams Zeros(int input_size, int hidden_size);
  int input_size() const { return static_cast<int>(w.cols()); }
  int hidden_size() const { return static_cast<int>(u.cols()); }

  std::vector<TensorView> Tensors(const std::string& prefix);
  std::vector<ConstTensorView> Tensors(const std::string& prefix) const;
};

struct LinearParams {
  Matrix w;  // O x I
  Vector b;  // O

  static LinearParams Zeros(int input_size, int output_size);
  int input_size() const { return static_cast<int>(w.cols()); }
  int output_size() const { return static_cast<int>(w.rows()); }

  std::vector<TensorView> Tensors(const std::string& prefix);
  std::vector<ConstTensorView> Tensors(const std::string& prefix) const;
};

// Intermediates kept by LstmForward for the backward pass.
struct LstmCache {
  Matrix inputs;     // T x D
  Vector h0, c0;     // H
  Matrix gates;      // T x 4H, post-activation
  Matrix cells;      // T x H
  Matrix cell_tanh;  // T x H
  Matrix hidden;     // T x H
};

struct LstmForwardResult {
  Matrix hidden;  // T x H
  LstmCache cache;
};

struct LstmGrads {
  LstmCellParams params;
  Matrix inputs;
  Vector h0, c0;
};

LstmForwardResult LstmForward(const LstmCellParams& params,
                              const Matrix& inputs, const Vector& h0,
                              const Vector& c0);

// Gradients of sum_t <grad_hidden[t], hidden[t]> with respect to every
// forward argument.
LstmGrads LstmBackward(const LstmCellParams& params, const LstmCache& cache,
                       const Matrix& grad_hidden);

struct BiLstmCache {
  LstmCache forward;
  LstmCache backward;  // over the reversed sequence
};

struct BiLstmForwardResult {
  Matrix output;  // T x 2H: forward state, then backward state
  BiLstmCache cache;
};

struct BiLstmGrads {
  LstmCellParams forward;
  LstmCellParams backward;
  Matrix inputs;
};

BiLstmForwardResult BiLstmForward(const LstmCellParams& forward,
                                  const LstmCellParams& backward,
                                  const Matrix& inputs);

BiLstmGrads BiLstmBackward(const LstmCellParams& forward,
                           const LstmCellParams& backward,
                           const BiLstmCache& cache, const Matrix& grad_output);

Vector LinearForward(const LinearParams& params, const Vector& input);
// Applies the layer to every row of `inputs`.
Matrix LinearForward(const LinearParams& params, const Matrix& inputs);

struct LinearGrads {
  LinearParams params;
  Vector input;
};

struct LinearBatchGrads {
  LinearParams params;
  Matrix inputs;
};

LinearGrads LinearBackward(const LinearParams& params, const Vector& input,
                           const Vector& grad_output);
LinearBatchGrads LinearBackward(const LinearParams& params,
                                const Matrix& inputs,
                                const Matrix& grad_outputs);

// Fills every tensor with U(-scale, scale) draws, in tensor order.
void InitUniform(std::span<const TensorView> tensors, double scale,
                 std::mt19937_64& rng);

// p <- p - lr * g, tensor by tensor. Shapes must agree.
void SgdStep(std::span<const TensorView> params,
             std::span<const ConstTensorView> grads, double lr);

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Vector> first_moment;
  std::vector<Vector> second_moment;
  std::int64_t step = 0;

  static AdamState For(std::span<const TensorView> params);
};

// One bias-corrected Adam update; increments state.step.
void AdamStep(std::span<const TensorView> params,
              std::span<const ConstTensorView> grads, AdamState& state,
              double lr, const AdamOptions& options = {});

double GlobalNorm(std::span<const ConstTensorView> grads);

// Rescales grads so their joint L2 norm is at most max_norm. Returns the
// factor applied (1 when no clipping happened).
double ClipByGlobalNorm(std::span<const TensorView> grads, double max_norm);

}  // namespace mwetag::nn

#endif  // MWETAG_NEURALNET_H_
