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

// Independent reference computations used by the tests. None of these call
// into the library's numeric code.

#ifndef MWETAG_TESTS_SUPPORT_ORACLES_H_
#define MWETAG_TESTS_SUPPORT_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace mwetag::testing {

// Dense row-major table used by the oracles, deliberately not Eigen.
struct Table {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Table() = default;
  Table(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c) {}
  double& operator()(int r, int c) {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    return v[static_cast<std::size_t>(r) * cols + c];
  }
};

struct CrfInstance {
  Table emissions;    // T x L
  Table transitions;  // L x L
  std::vector<double> start, end;
};

inline CrfInstance RandomCrfInstance(int T, int L, std::uint64_t seed,
                                     double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  CrfInstance inst{Table(T, L), Table(L, L), std::vector<double>(L),
                   std::vector<double>(L)};
  for (double& x : inst.emissions.v) x = normal(rng);
  for (double& x : inst.transitions.v) x = normal(rng);
  for (double& x : inst.start) x = normal(rng);
  for (double& x : inst.end) x = normal(rng);
  return inst;
}

// Calls fn(path) for all L^T paths in lexicographic order.
inline void ForEachPath(
    int T, int L, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> path(T, 0);
  while (true) {
    fn(path);
    int t = T - 1;
    while (t >= 0 && ++path[t] == L) path[t--] = 0;
    if (t < 0) return;
  }
}

inline double BrutePathScore(const CrfInstance& c, const std::vector<int>& y) {
  double s = c.start[y.front()] + c.end[y.back()];
  for (std::size_t t = 0; t < y.size(); ++t) {
    s += c.emissions(static_cast<int>(t), y[t]);
    if (t > 0) s += c.transitions(y[t - 1], y[t]);
  }
  return s;
}

struct BruteCrf {
  double log_z = 0.0;
  std::vector<int> best_path;
  double best_score = -std::numeric_limits<double>::infinity();
  Table marginals;
  Table pair_marginals;  // summed over positions, L x L
};

inline BruteCrf BruteForceCrf(const CrfInstance& c) {
  const int T = c.emissions.rows;
  const int L = c.emissions.cols;
  std::vector<double> scores;
  std::vector<std::vector<int>> paths;
  ForEachPath(T, L, [&](const std::vector<int>& y) {
    scores.push_back(BrutePathScore(c, y));
    paths.push_back(y);
  });
  BruteCrf out;
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - m);
  out.log_z = m + std::log(sum);
  out.marginals = Table(T, L);
  out.pair_marginals = Table(L, L);
  for (std::size_t k = 0; k < paths.size(); ++k) {
    if (scores[k] > out.best_score) {
      out.best_score = scores[k];
      out.best_path = paths[k];
    }
    const double p = std::exp(scores[k] - out.log_z);
    for (int t = 0; t < T; ++t) {
      out.marginals(t, paths[k][t]) += p;
      if (t > 0) out.pair_marginals(paths[k][t - 1], paths[k][t]) += p;
    }
  }
  return out;
}

// Step-by-step scalar LSTM (gate order i, f, g, o). w is 4H x D, u is 4H x H,
// inputs T x D. Returns T x H hidden states.
inline Table ScalarLstm(const Table& w, const Table& u,
                        const std::vector<double>& b, const Table& inputs,
                        std::vector<double> h, std::vector<double> c) {
  const int H = u.cols;
  const int D = w.cols;
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  Table out(inputs.rows, H);
  for (int t = 0; t < inputs.rows; ++t) {
    std::vector<double> a(4 * H);
    for (int r = 0; r < 4 * H; ++r) {
      double s = b[r];
      for (int d = 0; d < D; ++d) s += w(r, d) * inputs(t, d);
      for (int k = 0; k < H; ++k) s += u(r, k) * h[k];
      a[r] = s;
    }
    for (int k = 0; k < H; ++k) {
      const double i = sigmoid(a[k]);
      const double f = sigmoid(a[H + k]);
      const double g = std::tanh(a[2 * H + k]);
      const double o = sigmoid(a[3 * H + k]);
      c[k] = f * c[k] + i * g;
      h[k] = o * std::tanh(c[k]);
      out(t, k) = h[k];
    }
  }
  return out;
}

// Central difference of f with respect to each entry of `values`, which
// f must read through (the entries are perturbed in place and restored).
inline std::vector<double> NumericGradient(std::span<double> values,
                                           const std::function<double()>& f,
                                           double h = 1e-5) {
  std::vector<double> grad(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double up = f();
    values[i] = saved - h;
    const double down = f();
    values[i] = saved;
    grad[i] = (up - down) / (2 * h);
  }
  return grad;
}

// |a - n| / max(|a|, |n|, floor). The floor keeps entries that are zero up
// to round-off from reporting huge relative errors.
inline double RelativeError(double analytic, double numeric,
                            double floor = 1e-3) {
  const double den = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / den;
}

inline double MaxRelativeError(std::span<const double> analytic,
                               std::span<const double> numeric,
                               double floor = 1e-3) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    worst = std::max(worst, RelativeError(analytic[i], numeric[i], floor));
  }
  return worst;
}

}  // namespace mwetag::testing

#endif  // MWETAG_TESTS_SUPPORT_ORACLES_H_
