// Copyright 2026 the sddjd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>

#include "sddjd/types.hpp"

namespace sddjd {

/// Column-wise Kronecker (Khatri-Rao) product. Column n of the result is
/// kron(U.col(n), V.col(n)); shapes (M x N, P x N) -> (M*P x N).
inline CMatrix khatri_rao(const CMatrix& u, const CMatrix& v) {
  if (u.cols() != v.cols())
    throw DimensionError("khatri_rao: operands must have the same column count");
  const auto m = u.rows(), p = v.rows(), n = u.cols();
  CMatrix out(m * p, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      out.col(j).segment(i * p, p) = u(i, j) * v.col(j);
  return out;
}

/// Column-stacking vectorization: out(i + rows*j) = r(i, j).
inline CVector vec(const CMatrix& r) {
  return Eigen::Map<const CVector>(r.data(), r.size());
}

/// Rescales every column to unit Euclidean norm. Column directions are kept.
inline CMatrix normalize_columns(const CMatrix& a) {
  CMatrix out = a;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (!(norm > 0.0))
      throw DegenerateInputError("normalize_columns: zero column");
    out.col(j) /= norm;
  }
  return out;
}

/// Converts a noise-to-error ratio in dB into the noise amplitude delta,
/// inverting ner = 10*log10(1/delta^2).
inline double ner_to_delta(double ner_db) { return std::pow(10.0, -ner_db / 20.0); }

/// The forward ratio for a given noise amplitude.
inline double delta_to_ner(double delta) { return 10.0 * std::log10(1.0 / (delta * delta)); }

/// A * Diag(d) * A^H, the model matrix generated by a mixing matrix and one
/// diagonal coefficient vector.
inline CMatrix reconstruct(const CMatrix& a, const CVector& d) {
  if (a.cols() != d.size())
    throw DimensionError("reconstruct: diagonal length must match column count");
  return a * d.asDiagonal() * a.adjoint();
}

}  // namespace sddjd
