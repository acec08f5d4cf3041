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

#include "mwetag/neuralnet.h"

#include <cmath>
#include <string>

namespace mwetag::nn {
namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void Require(bool ok, const std::string& what) {
  if (!ok) throw ShapeMismatch(what);
}

void CheckLstm(const LstmCellParams& p) {
  const auto H = p.u.cols();
  Require(p.u.rows() == 4 * H && p.w.rows() == 4 * H && p.b.size() == 4 * H,
          "LSTM parameter blocks must have 4H rows");
}

Matrix ReverseRows(const Matrix& m) { return m.colwise().reverse(); }

template <typename Params, typename Grads>
void CheckPairs(std::span<Params> params, std::span<Grads> grads) {
  Require(params.size() == grads.size(), "parameter/gradient count differs");
  for (std::size_t k = 0; k < params.size(); ++k) {
    Require(params[k].shape == grads[k].shape &&
                params[k].values.size() == grads[k].values.size(),
            "shape mismatch for tensor '" + params[k].name + "'");
  }
}

}  // namespace

Matrix EmbeddingTable::Lookup(std::span<const int> ids) const {
  Matrix out(static_cast<Eigen::Index>(ids.size()), vectors.cols());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const int id = ids[t] >= 0 && ids[t] < vocab_size() ? ids[t] : kUnkId;
    out.row(static_cast<Eigen::Index>(t)) = vectors.row(id);
  }
  return out;
}

std::vector<TensorView> EmbeddingTable::Tensors(const std::string& prefix) {
  return {View(prefix + "vectors", vectors)};
}

std::vector<ConstTensorView> EmbeddingTable::Tensors(
    const std::string& prefix) const {
  return {View(prefix + "vectors", vectors)};
}

LstmCellParams LstmCellParams::Zeros(int input_size, int hidden_size) {
  return {Matrix::Zero(4 * hidden_size, input_size),
          Matrix::Zero(4 * hidden_size, hidden_size),
          Vector::Zero(4 * hidden_size)};
}

std::vector<TensorView> LstmCellParams::Tensors(const std::string& prefix) {
  return {View(prefix + "w", w), View(prefix + "u", u), View(prefix + "b", b)};
}

std::vector<ConstTensorView> LstmCellParams::Tensors(
    const std::string& prefix) const {
  return {View(prefix + "w", w), View(prefix + "u", u), View(prefix + "b", b)};
}

LinearParams LinearParams::Zeros(int input_size, int output_size) {
  return {Matrix::Zero(output_size, input_size), Vector::Zero(output_size)};
}

std::vector<TensorView> LinearParams::Tensors(const std::string& prefix) {
  return {View(prefix + "w", w), View(prefix + "b", b)};
}

std::vector<ConstTensorView> LinearParams::Tensors(
    const std::string& prefix) const {
  return {View(prefix + "w", w), View(prefix + "b", b)};
}

LstmForwardResult LstmForward(const LstmCellParams& params,
                              const Matrix& inputs, const Vector& h0,
                              const Vector& c0) {
  CheckLstm(params);
  const auto T = inputs.rows();
  const auto H = params.u.cols();
  if (T == 0) throw EmptySequence();
  Require(inputs.cols() == params.w.cols(),
          "LSTM input width " + std::to_string(inputs.cols()) +
              " != parameter input size " + std::to_string(params.w.cols()));
  Require(h0.size() == H && c0.size() == H, "LSTM initial state size != H");

  LstmCache cache;
  cache.inputs = inputs;
  cache.h0 = h0;
  cache.c0 = c0;
  cache.gates.resize(T, 4 * H);
  cache.cells.resize(T, H);
  cache.cell_tanh.resize(T, H);
  cache.hidden.resize(T, H);

  // Input contributions for all steps at once: T x 4H.
  const Matrix projected = inputs * params.w.transpose();
  Vector h = h0;
  Vector c = c0;
  Vector a(4 * H);
  for (Eigen::Index t = 0; t < T; ++t) {
    a = projected.row(t).transpose() + params.u * h + params.b;
    for (Eigen::Index k = 0; k < H; ++k) {
      const double i = Sigmoid(a(k));
      const double f = Sigmoid(a(H + k));
      const double g = std::tanh(a(2 * H + k));
      const double o = Sigmoid(a(3 * H + k));
      c(k) = f * c(k) + i * g;
      const double tc = std::tanh(c(k));
      h(k) = o * tc;
      cache.gates(t, k) = i;
      cache.gates(t, H + k) = f;
      cache.gates(t, 2 * H + k) = g;
      cache.gates(t, 3 * H + k) = o;
      cache.cell_tanh(t, k) = tc;
    }
    cache.cells.row(t) = c.transpose();
    cache.hidden.row(t) = h.transpose();
  }
  LstmForwardResult result;
  result.hidden = cache.hidden;
  result.cache = std::move(cache);
  return result;
}

LstmGrads LstmBackward(const LstmCellParams& params, const LstmCache& cache,
                       const Matrix& grad_hidden) {
  CheckLstm(params);
  const auto T = cache.hidden.rows();
  const auto H = params.u.cols();
  if (cache.inputs.cols() != params.w.cols() || cache.hidden.cols() != H ||
      cache.gates.rows() != T || cache.gates.cols() != 4 * H ||
      cache.h0.size() != H || cache.c0.size() != H) {
    throw StaleCache("LSTM cache does not match the parameters");
  }
  if (grad_hidden.rows() != T || grad_hidden.cols() != H) {
    throw StaleCache("grad_hidden is " + std::to_string(grad_hidden.rows()) +
                     "x" + std::to_string(grad_hidden.cols()) +
                     ", cache expects " + std::to_string(T) + "x" +
                     std::to_string(H));
  }

  Matrix grad_pre(T, 4 * H);  // gradients w.r.t. gate pre-activations
  Vector dh_next = Vector::Zero(H);
  Vector dc_next = Vector::Zero(H);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    for (Eigen::Index k = 0; k < H; ++k) {
      const double i = cache.gates(t, k);
      const double f = cache.gates(t, H + k);
      const double g = cache.gates(t, 2 * H + k);
      const double o = cache.gates(t, 3 * H + k);
      const double tc = cache.cell_tanh(t, k);
      const double c_prev = t > 0 ? cache.cells(t - 1, k) : cache.c0(k);

      const double dh = grad_hidden(t, k) + dh_next(k);
      const double dc = dc_next(k) + dh * o * (1.0 - tc * tc);
      grad_pre(t, k) = dc * g * i * (1.0 - i);
      grad_pre(t, H + k) = dc * c_prev * f * (1.0 - f);
      grad_pre(t, 2 * H + k) = dc * i * (1.0 - g * g);
      grad_pre(t, 3 * H + k) = dh * tc * o * (1.0 - o);
      dc_next(k) = dc * f;
    }
    dh_next = params.u.transpose() * grad_pre.row(t).transpose();
  }

  Matrix previous_hidden(T, H);
  previous_hidden.row(0) = cache.h0.transpose();
  if (T > 1) previous_hidden.bottomRows(T - 1) = cache.hidden.topRows(T - 1);

  LstmGrads grads;
  grads.params.w = grad_pre.transpose() * cache.inputs;
  grads.params.u = grad_pre.transpose() * previous_hidden;
  grads.params.b = grad_pre.colwise().sum().transpose();
  grads.inputs = grad_pre * params.w;
  grads.h0 = dh_next;
  grads.c0 = dc_next;
  return grads;
}

BiLstmForwardResult BiLstmForward(const LstmCellParams& forward,
                                  const LstmCellParams& backward,
                                  const Matrix& inputs) {
  const auto Hf = forward.hidden_size();
  const auto Hb = backward.hidden_size();
  auto fwd = LstmForward(forward, inputs, Vector::Zero(Hf), Vector::Zero(Hf));
  auto bwd = LstmForward(backward, ReverseRows(inputs), Vector::Zero(Hb),
                         Vector::Zero(Hb));
  BiLstmForwardResult result;
  result.output.resize(inputs.rows(), Hf + Hb);
  result.output.leftCols(Hf) = fwd.hidden;
  result.output.rightCols(Hb) = ReverseRows(bwd.hidden);
  result.cache.forward = std::move(fwd.cache);
  result.cache.backward = std::move(bwd.cache);
  return result;
}

BiLstmGrads BiLstmBackward(const LstmCellParams& forward,
                           const LstmCellParams& backward,
                           const BiLstmCache& cache,
                           const Matrix& grad_output) {
  const auto Hf = forward.hidden_size();
  const auto Hb = backward.hidden_size();
  if (grad_output.cols() != Hf + Hb) {
    throw StaleCache("BiLSTM output gradient width != 2H");
  }
  auto fwd = LstmBackward(forward, cache.forward, grad_output.leftCols(Hf));
  auto bwd = LstmBackward(backward, cache.backward,
                          ReverseRows(grad_output.rightCols(Hb)));
  BiLstmGrads grads;
  grads.forward = std::move(fwd.params);
  grads.backward = std::move(bwd.params);
  grads.inputs = fwd.inputs + ReverseRows(bwd.inputs);
  return grads;
}

Vector LinearForward(const LinearParams& params, const Vector& input) {
  Require(params.b.size() == params.w.rows(), "linear bias size != O");
  Require(input.size() == params.w.cols(),
          "linear input size " + std::to_string(input.size()) +
              " != " + std::to_string(params.w.cols()));
  return params.w * input + params.b;
}

Matrix LinearForward(const LinearParams& params, const Matrix& inputs) {
  Require(params.b.size() == params.w.rows(), "linear bias size != O");
  Require(inputs.cols() == params.w.cols(),
          "linear input width " + std::to_string(inputs.cols()) +
              " != " + std::to_string(params.w.cols()));
  Matrix out = inputs * params.w.transpose();
  out.rowwise() += params.b.transpose();
  return out;
}

LinearGrads LinearBackward(const LinearParams& params, const Vector& input,
                           const Vector& grad_output) {
  Require(
      input.size() == params.w.cols() && grad_output.size() == params.w.rows(),
      "linear backward shape mismatch");
  LinearGrads grads;
  grads.params.w = grad_output * input.transpose();
  grads.params.b = grad_output;
  grads.input = params.w.transpose() * grad_output;
  return grads;
}

LinearBatchGrads LinearBackward(const LinearParams& params,
                                const Matrix& inputs,
                                const Matrix& grad_outputs) {
  Require(inputs.cols() == params.w.cols() &&
              grad_outputs.cols() == params.w.rows() &&
              inputs.rows() == grad_outputs.rows(),
          "linear backward shape mismatch");
  LinearBatchGrads grads;
  grads.params.w = grad_outputs.transpose() * inputs;
  grads.params.b = grad_outputs.colwise().sum().transpose();
  grads.inputs = grad_outputs * params.w;
  return grads;
}

void InitUniform(std::span<const TensorView> tensors, double scale,
                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (const auto& t : tensors) {
    for (double& v : t.values) v = dist(rng);
  }
}

void SgdStep(std::span<const TensorView> params,
             std::span<const ConstTensorView> grads, double lr) {
  if (!(lr > 0)) throw Error("learning rate must be positive");
  CheckPairs(params, grads);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k].values;
    auto g = grads[k].values;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * g[i];
  }
}

AdamState AdamState::For(std::span<const TensorView> params) {
  AdamState state;
  for (const auto& p : params) {
    state.first_moment.push_back(Vector::Zero(p.values.size()));
    state.second_moment.push_back(Vector::Zero(p.values.size()));
  }
  return state;
}

void AdamStep(std::span<const TensorView> params,
              std::span<const ConstTensorView> grads, AdamState& state,
              double lr, const AdamOptions& options) {
  if (!(lr > 0)) throw Error("learning rate must be positive");
  CheckPairs(params, grads);
  Require(state.first_moment.size() == params.size() &&
              state.second_moment.size() == params.size(),
          "Adam state does not match the parameter list");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k].values;
    auto g = grads[k].values;
    Vector& m = state.first_moment[k];
    Vector& v = state.second_moment[k];
    Require(static_cast<std::size_t>(m.size()) == p.size() &&
                static_cast<std::size_t>(v.size()) == p.size(),
            "Adam state shape mismatch for '" + params[k].name + "'");
    for (std::size_t i = 0; i < p.size(); ++i) {
      const auto j = static_cast<Eigen::Index>(i);
      m(j) = options.beta1 * m(j) + (1.0 - options.beta1) * g[i];
      v(j) = options.beta2 * v(j) + (1.0 - options.beta2) * g[i] * g[i];
      const double m_hat = m(j) / correction1;
      const double v_hat = v(j) / correction2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

double GlobalNorm(std::span<const ConstTensorView> grads) {
  double sum = 0.0;
  for (const auto& g : grads) {
    for (double v : g.values) sum += v * v;
  }
  return std::sqrt(sum);
}

double ClipByGlobalNorm(std::span<const TensorView> grads, double max_norm) {
  std::vector<ConstTensorView> views;
  views.reserve(grads.size());
  for (const auto& g : grads) views.push_back(AsConst(g));
  const double norm = GlobalNorm(views);
  if (!(max_norm > 0) || norm <= max_norm) return 1.0;
  const double scale = max_norm / norm;
  for (const auto& g : grads) {
    for (double& v : g.values) v *= scale;
  }
  return scale;
}

}  // namespace mwetag::nn
