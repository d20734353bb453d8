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

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sddjd/errors.hpp"

namespace sddjd {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// The K per-matrix diagonal factors, stored as length-N coefficient vectors.
using DiagonalSet = std::vector<CVector>;

/// Per-target-matrix provenance tag.
struct MatrixOrigin {
  enum class Kind { Clean, Noisy, Outlier };
  Kind kind = Kind::Clean;
  double delta = 0.0;  // noise level, meaningful for Kind::Noisy

  bool operator==(const MatrixOrigin&) const = default;
};

/// Ground truth attached to synthetic problems: the generating mixing matrix
/// (unit-norm columns) and the generating diagonal factors.
struct GroundTruth {
  CMatrix mixing;          // M x N
  DiagonalSet diagonals;   // K vectors of length N
};

/// The set of K square matrices to be jointly diagonalized.
struct TargetSet {
  std::vector<CMatrix> matrices;     // K matrices, each M x M
  int n_sources = 0;                 // N, number of columns of the mixing matrix
  std::vector<MatrixOrigin> origin;  // empty or size K
  std::optional<GroundTruth> truth;
  std::uint64_t seed = 0;            // generator seed when synthetic

  int count() const { return static_cast<int>(matrices.size()); }
  int dim() const { return matrices.empty() ? 0 : static_cast<int>(matrices.front().rows()); }

  void validate() const {
    if (matrices.size() < 2) throw SpecError("target set needs at least 2 matrices");
    const auto m = matrices.front().rows();
    for (const auto& r : matrices) {
      if (r.rows() != r.cols()) throw DimensionError("target matrices must be square");
      if (r.rows() != m) throw DimensionError("target matrices must share one dimension");
      if (!r.allFinite()) throw NumericError("target matrix has non-finite entries");
    }
    if (n_sources < 2 || n_sources > m)
      throw SpecError("source count must satisfy 2 <= N <= M");
    if (!origin.empty() && origin.size() != matrices.size())
      throw SpecError("origin tags must be absent or one per matrix");
    if (truth) {
      if (truth->mixing.rows() != m || truth->mixing.cols() != n_sources)
        throw DimensionError("ground-truth mixing matrix has wrong shape");
      if (truth->diagonals.size() != matrices.size())
        throw DimensionError("ground truth needs one diagonal vector per matrix");
    }
  }
};

/// Parameters of the synthetic problem generator.
struct SynthSpec {
  int rows = 6;                       // M
  int sources = 6;                    // N, 2 <= N <= M
  int count = 20;                     // K
  std::vector<double> noise_levels{0.0};  // one delta, or one per matrix
  double outlier_fraction = 0.0;      // in [0, 1)
  std::uint64_t seed = 0;

  void validate() const {
    if (rows < 2) throw SpecError("need M >= 2");
    if (sources < 2 || sources > rows) throw SpecError("need 2 <= N <= M");
    if (count < 2) throw SpecError("need K >= 2");
    if (noise_levels.size() != 1 && noise_levels.size() != static_cast<size_t>(count))
      throw SpecError("noise levels must be a scalar or one value per matrix");
    for (double d : noise_levels)
      if (!(d >= 0.0)) throw SpecError("noise levels must be nonnegative");
    if (!(outlier_fraction >= 0.0) || outlier_fraction >= 1.0)
      throw SpecError("outlier fraction must lie in [0, 1)");
  }

  double noise_level(int k) const {
    return noise_levels.size() == 1 ? noise_levels.front() : noise_levels[static_cast<size_t>(k)];
  }
};

}  // namespace sddjd
