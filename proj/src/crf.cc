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

#include "mwetag/crf.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mwetag::crf {
namespace {

void CheckShapes(const EmissionMatrix& e, const CrfParams& p) {
  if (e.rows() == 0) throw EmptySequence();
  const auto L = p.start.size();
  if (e.cols() != L || p.end.size() != L || p.transitions.rows() != L ||
      p.transitions.cols() != L) {
    throw ShapeMismatch("CRF emission/parameter label counts disagree");
  }
}

void CheckPath(const EmissionMatrix& e, std::span<const int> path) {
  if (static_cast<Eigen::Index>(path.size()) != e.rows()) {
    throw LengthMismatch("label path has " + std::to_string(path.size()) +
                         " entries for " + std::to_string(e.rows()) +
                         " positions");
  }
  for (int y : path) {
    if (y < 0 || y >= e.cols()) {
      throw Error("label index " + std::to_string(y) + " out of range");
    }
  }
}

double LogSumExp(const Eigen::Ref<const Vector>& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// alpha(t, l): log-sum of scores of all prefixes ending in l at t, including
// the start score and emissions up to t.
Matrix ForwardTable(const EmissionMatrix& e, const CrfParams& p) {
  const auto T = e.rows();
  const auto L = e.cols();
  Matrix alpha(T, L);
  alpha.row(0) = p.start.transpose() + e.row(0);
  Vector scratch(L);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index j = 0; j < L; ++j) {
      scratch = alpha.row(t - 1).transpose() + p.transitions.col(j);
      alpha(t, j) = LogSumExp(scratch) + e(t, j);
    }
  }
  return alpha;
}

// beta(t, l): log-sum of scores of all suffixes after t given y_t = l,
// including the end score but excluding emissions at t.
Matrix BackwardTable(const EmissionMatrix& e, const CrfParams& p) {
  const auto T = e.rows();
  const auto L = e.cols();
  Matrix beta(T, L);
  beta.row(T - 1) = p.end.transpose();
  Vector scratch(L);
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    for (Eigen::Index i = 0; i < L; ++i) {
      scratch = p.transitions.row(i).transpose() + e.row(t + 1).transpose() +
                beta.row(t + 1).transpose();
      beta(t, i) = LogSumExp(scratch);
    }
  }
  return beta;
}

double LogZFromAlpha(const Matrix& alpha, const CrfParams& p) {
  const Vector last = alpha.row(alpha.rows() - 1).transpose() + p.end;
  return LogSumExp(last);
}

}  // namespace

CrfParams CrfParams::Zeros(int num_labels) {
  return {Matrix::Zero(num_labels, num_labels), Vector::Zero(num_labels),
          Vector::Zero(num_labels)};
}

std::vector<TensorView> CrfParams::Tensors(const std::string& prefix) {
  return {View(prefix + "transitions", transitions),
          View(prefix + "start", start), View(prefix + "end", end)};
}

std::vector<ConstTensorView> CrfParams::Tensors(
    const std::string& prefix) const {
  return {View(prefix + "transitions", transitions),
          View(prefix + "start", start), View(prefix + "end", end)};
}

double LogPartition(const EmissionMatrix& emissions, const CrfParams& params) {
  CheckShapes(emissions, params);
  return LogZFromAlpha(ForwardTable(emissions, params), params);
}

double PathScore(const EmissionMatrix& emissions, const CrfParams& params,
                 std::span<const int> path) {
  CheckShapes(emissions, params);
  CheckPath(emissions, path);
  double score = params.start(path.front()) + params.end(path.back());
  for (std::size_t t = 0; t < path.size(); ++t) {
    score += emissions(static_cast<Eigen::Index>(t), path[t]);
    if (t > 0) score += params.transitions(path[t - 1], path[t]);
  }
  return score;
}

Matrix Marginals(const EmissionMatrix& emissions, const CrfParams& params) {
  CheckShapes(emissions, params);
  const Matrix alpha = ForwardTable(emissions, params);
  const Matrix beta = BackwardTable(emissions, params);
  const double log_z = LogZFromAlpha(alpha, params);
  return (alpha + beta).array().unaryExpr([log_z](double v) {
    return std::exp(v - log_z);
  });
}

CrfLoss NllAndGrads(const EmissionMatrix& emissions, const CrfParams& params,
                    std::span<const int> gold) {
  CheckShapes(emissions, params);
  CheckPath(emissions, gold);
  const auto T = emissions.rows();
  const auto L = emissions.cols();

  const Matrix alpha = ForwardTable(emissions, params);
  const Matrix beta = BackwardTable(emissions, params);
  const double log_z = LogZFromAlpha(alpha, params);

  CrfLoss out;
  // Clamp tiny negative values caused by rounding; the true loss is >= 0.
  // NaN must pass through so callers can detect divergence.
  out.loss = log_z - PathScore(emissions, params, gold);
  if (out.loss < 0.0) out.loss = 0.0;

  out.grad_emissions = (alpha + beta).array().unaryExpr([log_z](double v) {
    return std::exp(v - log_z);
  });
  out.grad_params = CrfParams::Zeros(static_cast<int>(L));
  out.grad_params.start = out.grad_emissions.row(0).transpose();
  out.grad_params.end = out.grad_emissions.row(T - 1).transpose();

  // Pairwise marginals P(y_{t-1} = i, y_t = j).
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index i = 0; i < L; ++i) {
      for (Eigen::Index j = 0; j < L; ++j) {
        out.grad_params.transitions(i, j) +=
            std::exp(alpha(t - 1, i) + params.transitions(i, j) +
                     emissions(t, j) + beta(t, j) - log_z);
      }
    }
  }

  for (Eigen::Index t = 0; t < T; ++t) {
    out.grad_emissions(t, gold[t]) -= 1.0;
    if (t > 0) out.grad_params.transitions(gold[t - 1], gold[t]) -= 1.0;
  }
  out.grad_params.start(gold.front()) -= 1.0;
  out.grad_params.end(gold.back()) -= 1.0;
  return out;
}

ViterbiResult Viterbi(const EmissionMatrix& emissions,
                      const CrfParams& params) {
  CheckShapes(emissions, params);
  const auto T = emissions.rows();
  const auto L = emissions.cols();

  Matrix best(T, L);
  Eigen::MatrixXi back = Eigen::MatrixXi::Zero(T, L);
  best.row(0) = params.start.transpose() + emissions.row(0);
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index j = 0; j < L; ++j) {
      // Strict comparison keeps the lowest index on ties.
      int arg = 0;
      double top = best(t - 1, 0) + params.transitions(0, j);
      for (Eigen::Index i = 1; i < L; ++i) {
        const double v = best(t - 1, i) + params.transitions(i, j);
        if (v > top) {
          top = v;
          arg = static_cast<int>(i);
        }
      }
      best(t, j) = top + emissions(t, j);
      back(t, j) = arg;
    }
  }

  ViterbiResult result;
  result.path.assign(T, 0);
  int arg = 0;
  double top = best(T - 1, 0) + params.end(0);
  for (Eigen::Index j = 1; j < L; ++j) {
    const double v = best(T - 1, j) + params.end(j);
    if (v > top) {
      top = v;
      arg = static_cast<int>(j);
    }
  }
  result.score = top;
  result.path[T - 1] = arg;
  for (Eigen::Index t = T - 1; t > 0; --t) {
    result.path[t - 1] = back(t, result.path[t]);
  }
  return result;
}

}  // namespace mwetag::crf
