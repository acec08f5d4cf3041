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

#ifndef MWETAG_TENSOR_H_
#define MWETAG_TENSOR_H_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mwetag {

// Row-major so that row t of a sequence matrix is contiguous and flat
// payloads serialize in the natural order.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Named flat view of one parameter tensor.
struct TensorView {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::span<double> values;
};

struct ConstTensorView {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::span<const double> values;
};

inline TensorView View(std::string name, Matrix& m) {
  return {std::move(name),
          {static_cast<std::uint32_t>(m.rows()),
           static_cast<std::uint32_t>(m.cols())},
          {m.data(), static_cast<std::size_t>(m.size())}};
}

inline TensorView View(std::string name, Vector& v) {
  return {std::move(name),
          {static_cast<std::uint32_t>(v.size())},
          {v.data(), static_cast<std::size_t>(v.size())}};
}

inline ConstTensorView View(std::string name, const Matrix& m) {
  return {std::move(name),
          {static_cast<std::uint32_t>(m.rows()),
           static_cast<std::uint32_t>(m.cols())},
          {m.data(), static_cast<std::size_t>(m.size())}};
}

inline ConstTensorView View(std::string name, const Vector& v) {
  return {std::move(name),
          {static_cast<std::uint32_t>(v.size())},
          {v.data(), static_cast<std::size_t>(v.size())}};
}

inline ConstTensorView AsConst(const TensorView& t) {
  return {t.name, t.shape, t.values};
}

}  // namespace mwetag

#endif  // MWETAG_TENSOR_H_
