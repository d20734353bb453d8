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

#include "sddjd/types.hpp"

namespace sddjd {

/// Moore-Penrose pseudo-inverse via SVD, dropping singular values below
/// 1e-12 times the largest one.
inline CMatrix pseudo_inverse(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0)) return CMatrix::Zero(a.cols(), a.rows());
  const double cutoff = 1e-12 * sv(0);
  RVector inv = RVector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// Gain matrix pinv(A_hat) * A_true: identity (up to permutation and scaling)
/// when the estimate matches the truth.
inline CMatrix gain(const CMatrix& a_hat, const CMatrix& a_true) {
  if (a_hat.rows() != a_true.rows() || a_hat.cols() != a_true.cols())
    throw DimensionError("gain: estimate and truth must have the same shape");
  return pseudo_inverse(a_hat) * a_true;
}

/// Global rejection level of a square gain matrix: for each column, the ratio
/// of total to peak squared magnitude minus one, plus the same per row. Zero
/// exactly when G is a generalized permutation (one nonzero per row and
/// column), which is the intrinsic ambiguity of the factorization; invariant
/// under global rescaling of G.
inline double global_rejection_level(const CMatrix& g) {
  if (g.rows() != g.cols()) throw DimensionError("global_rejection_level: gain must be square");
  const RMatrix w = g.cwiseAbs2();
  double total = 0.0;
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    const double peak = w.col(j).maxCoeff();
    if (!(peak > 0.0)) throw DegenerateGainError("global_rejection_level: all-zero column");
    total += w.col(j).sum() / peak - 1.0;
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double peak = w.row(i).maxCoeff();
    if (!(peak > 0.0)) throw DegenerateGainError("global_rejection_level: all-zero row");
    total += w.row(i).sum() / peak - 1.0;
  }
  return total;
}

/// Sum of squared off-diagonal magnitudes of the transformed set
/// { V R_k V^H }. A diagnostic for how diagonal a candidate demixing matrix
/// leaves the targets; never optimized directly here.
inline double off_diagonality(const CMatrix& v, const TargetSet& targets) {
  double total = 0.0;
  for (const auto& r : targets.matrices) {
    if (r.rows() != v.cols()) throw DimensionError("off_diagonality: shape mismatch");
    const CMatrix t = v * r * v.adjoint();
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      for (Eigen::Index j = 0; j < t.cols(); ++j)
        if (i != j) total += std::norm(t(i, j));
  }
  return total;
}

}  // namespace sddjd
