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

#include <algorithm>
#include <cmath>
#include <vector>

#include "sddjd/matrix_ops.hpp"
#include "sddjd/rng.hpp"
#include "sddjd/types.hpp"

namespace sddjd {

namespace detail {

// Substream tags for the generator; one substream per drawn object keeps the
// draws independent of K and of each other.
enum StreamTag : std::uint64_t {
  kStreamMixing = 0,
  kStreamDiagonal = 1,
  kStreamNoise = 2,
  kStreamOutlier = 3,
  kStreamSelect = 4,
};

inline CMatrix draw_complex_normal(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  CMatrix out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      out(i, j) = rng.next_complex_normal();
  return out;
}

}  // namespace detail

/// Generates a synthetic joint-diagonalization problem: a random mixing
/// matrix with unit-norm columns, K random diagonal factors, per-matrix
/// perturbations scaled by the requested noise levels, and a chosen fraction
/// of matrices replaced outright by unstructured random matrices. All draws
/// have independent standard normal real and imaginary parts. The result is
/// a deterministic function of the seed.
inline TargetSet synthesize(const SynthSpec& spec) {
  spec.validate();
  const int m = spec.rows, n = spec.sources, kms = spec.count;

  Rng mixing_rng(derive_stream(spec.seed, {detail::kStreamMixing, 0}));
  const CMatrix a_true = normalize_columns(detail::draw_complex_normal(mixing_rng, m, n));

  TargetSet out;
  out.n_sources = n;
  out.seed = spec.seed;
  out.matrices.reserve(static_cast<size_t>(kms));
  GroundTruth truth;
  truth.mixing = a_true;
  truth.diagonals.reserve(static_cast<size_t>(kms));

  for (int k = 0; k < kms; ++k) {
    Rng diag_rng(derive_stream(spec.seed, {detail::kStreamDiagonal, static_cast<std::uint64_t>(k)}));
    CVector d(n);
    for (int i = 0; i < n; ++i) d(i) = diag_rng.next_complex_normal();
    truth.diagonals.push_back(d);

    Rng noise_rng(derive_stream(spec.seed, {detail::kStreamNoise, static_cast<std::uint64_t>(k)}));
    const CMatrix perturbation = detail::draw_complex_normal(noise_rng, m, m);

    const double delta = spec.noise_level(k);
    CMatrix r = reconstruct(a_true, d);
    if (delta > 0.0) r += delta * perturbation;
    out.matrices.push_back(std::move(r));
    out.origin.push_back(delta > 0.0
                             ? MatrixOrigin{MatrixOrigin::Kind::Noisy, delta}
                             : MatrixOrigin{MatrixOrigin::Kind::Clean, 0.0});
  }

  // Replace floor(outlier_fraction * K) matrices, chosen uniformly without
  // replacement, by fresh unstructured draws. The small epsilon keeps decimal
  // fractions like 0.7 * 20 from flooring one short of the intended count.
  const int n_outliers =
      static_cast<int>(std::floor(spec.outlier_fraction * kms + 1e-9));
  if (n_outliers > 0) {
    std::vector<int> indices(static_cast<size_t>(kms));
    for (int i = 0; i < kms; ++i) indices[static_cast<size_t>(i)] = i;
    Rng select_rng(derive_stream(spec.seed, {detail::kStreamSelect, 0}));
    for (int i = 0; i < n_outliers; ++i) {
      const auto j = i + static_cast<int>(select_rng.next_below(
                             static_cast<std::uint64_t>(kms - i)));
      std::swap(indices[static_cast<size_t>(i)], indices[static_cast<size_t>(j)]);
    }
    for (int i = 0; i < n_outliers; ++i) {
      const int k = indices[static_cast<size_t>(i)];
      Rng outlier_rng(derive_stream(spec.seed, {detail::kStreamOutlier, static_cast<std::uint64_t>(k)}));
      out.matrices[static_cast<size_t>(k)] = detail::draw_complex_normal(outlier_rng, m, m);
      out.origin[static_cast<size_t>(k)] = {MatrixOrigin::Kind::Outlier, 0.0};
    }
  }

  out.truth = std::move(truth);
  out.validate();
  return out;
}

/// Number of matrices a spec will tag as outliers.
inline int outlier_count(const SynthSpec& spec) {
  return static_cast<int>(std::floor(spec.outlier_fraction * spec.count + 1e-9));
}

}  // namespace sddjd
