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
//
// Soft decision-directed non-unitary joint diagonalization.
//
// Given K square matrices R_k, the solver fits the common structure
// R_k ~ A Diag(d_k) A^H by alternating between a mixing-matrix update and a
// per-matrix diagonal update. Each matrix carries a softmax weight derived
// from its current squared Frobenius residual, so matrices that do not fit
// the shared structure (outliers) lose influence as the fit tightens. With
// frozen weights the same loop is the classic uniformly weighted
// least-squares alternating scheme.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sddjd/matrix_ops.hpp"
#include "sddjd/types.hpp"

namespace sddjd {

enum class Weighting { Soft, Uniform };

struct SolverConfig {
  double epsilon = 1e-4;          // stop when ||A_t - A_{t-1}||_F drops below
  int t_max = 1500;               // outer iteration cap
  int inner_a_updates = 1;        // mixing updates per outer iteration
  double sigma2_floor_rel = 1e-8;  // static floor for sigma^2, relative to data scale
  double ridge_rel = 1e-10;       // Tikhonov ridge for an ill-conditioned solve
  Weighting weighting = Weighting::Soft;
  bool rebalance_columns = true;  // renormalize A's columns each iteration
  bool record_trajectory = false;

  void validate() const {
    if (!(epsilon > 0.0)) throw SpecError("epsilon must be positive");
    if (t_max < 1) throw SpecError("t_max must be at least 1");
    if (inner_a_updates < 1) throw SpecError("inner_a_updates must be at least 1");
    if (!(sigma2_floor_rel > 0.0)) throw SpecError("sigma2 floor must be positive");
    if (!(ridge_rel >= 0.0)) throw SpecError("ridge must be nonnegative");
  }
};

/// Per-iteration bookkeeping of the alternating loop.
struct SolverState {
  RVector residuals;  // K squared Frobenius residuals
  RVector weights;    // K softmax (or frozen) weights, sum 1
  double sigma2 = 0.0;
  int iteration = 0;
};

struct IterationRecord {
  int t = 0;
  double sigma2 = 0.0;
  double cost = 0.0;
  double step_norm = 0.0;
  RVector weights;  // weights in effect at the last mixing update of this iteration
  // Weighted residual sums around the diagonal update, kept for diagnostics.
  double weighted_residual_pre_d = 0.0;
  double weighted_residual_post_d = 0.0;
};

struct RunResult {
  CMatrix mixing;          // estimated A, M x N
  DiagonalSet diagonals;   // estimated d_k, K vectors of length N
  bool converged = false;
  int iterations = 0;
  SolverState final_state;
  std::vector<IterationRecord> trajectory;  // empty unless requested
};

/// Squared Frobenius norm of R - A Diag(d) A^H.
inline double residual(const CMatrix& r, const CMatrix& a, const CVector& d) {
  if (r.rows() != r.cols() || r.rows() != a.rows())
    throw DimensionError("residual: shape mismatch between target and mixing matrix");
  return (r - reconstruct(a, d)).squaredNorm();
}

inline RVector residuals(const TargetSet& targets, const CMatrix& a, const DiagonalSet& d) {
  if (d.size() != targets.matrices.size())
    throw DimensionError("residuals: need one diagonal vector per target matrix");
  RVector out(targets.count());
  for (int k = 0; k < targets.count(); ++k)
    out(k) = residual(targets.matrices[static_cast<size_t>(k)], a, d[static_cast<size_t>(k)]);
  return out;
}

/// Softmax weights mu_k = exp(-e_k / 2 sigma^2) / sum_l exp(-e_l / 2 sigma^2).
/// The smallest residual is subtracted inside the exponent, which leaves the
/// value unchanged and cannot overflow. The output sums to 1.
inline RVector compute_weights(const RVector& residuals_sq, double sigma2) {
  if (!(sigma2 > 0.0)) throw NumericError("compute_weights: sigma2 must be positive");
  if (!residuals_sq.allFinite()) throw NumericError("compute_weights: non-finite residual");
  const double shift = residuals_sq.minCoeff();
  RVector w(residuals_sq.size());
  // scalar std::exp: Eigen's packet exp saturates for very negative arguments
  // instead of underflowing, which would tie weights that must stay ordered
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w(i) = std::exp(-(residuals_sq(i) - shift) / (2.0 * sigma2));
  w /= w.sum();
  return w;
}

/// Weighted average of residuals, clamped from below. The caller supplies
/// weights summing to one.
inline double update_sigma2(const RVector& weights, const RVector& residuals_sq, double floor) {
  return std::max(weights.dot(residuals_sq), floor);
}

/// Coefficient matrix of the stationarity system A C = B for the mixing
/// update: C = sum_k mu_k (D_k^* A^H A D_k + D_k A^H A D_k^*). Hermitian,
/// positive semidefinite.
inline CMatrix normal_matrix(const CMatrix& a, const DiagonalSet& d, const RVector& weights) {
  const auto n = a.cols();
  const CMatrix gram = a.adjoint() * a;
  CMatrix c = CMatrix::Zero(n, n);
  for (size_t k = 0; k < d.size(); ++k) {
    if (d[k].size() != n) throw DimensionError("normal_matrix: diagonal length mismatch");
    const CVector dc = d[k].conjugate();
    c.noalias() += weights(static_cast<Eigen::Index>(k)) *
                   (dc.asDiagonal() * gram * d[k].asDiagonal() +
                    d[k].asDiagonal() * gram * dc.asDiagonal());
  }
  return c;
}

/// Right-hand side of the stationarity system:
/// B = sum_k mu_k (R_k^H A D_k + R_k A D_k^*).
inline CMatrix rhs_matrix(const CMatrix& a, const TargetSet& targets, const DiagonalSet& d,
                          const RVector& weights) {
  if (d.size() != targets.matrices.size())
    throw DimensionError("rhs_matrix: need one diagonal vector per target matrix");
  CMatrix b = CMatrix::Zero(a.rows(), a.cols());
  for (size_t k = 0; k < d.size(); ++k) {
    const auto& r = targets.matrices[k];
    if (r.rows() != a.rows()) throw DimensionError("rhs_matrix: target/mixing shape mismatch");
    const CVector dc = d[k].conjugate();
    b.noalias() += weights(static_cast<Eigen::Index>(k)) *
                   (r.adjoint() * a * d[k].asDiagonal() + r * a * dc.asDiagonal());
  }
  return b;
}

/// One mixing-matrix update: solve A_next C(A) = B(A) against the Hermitian
/// coefficient matrix. When the reciprocal condition estimate falls below
/// 1e-12 the system is regularized with a ridge of ridge_rel * trace(C) / N
/// before solving; a system that stays singular (all diagonal factors near
/// zero) is reported as a degenerate model.
inline CMatrix update_mixing(const CMatrix& a, const TargetSet& targets, const DiagonalSet& d,
                             const RVector& weights, double ridge_rel) {
  CMatrix c = normal_matrix(a, d, weights);
  const CMatrix b = rhs_matrix(a, targets, d, weights);

  Eigen::SelfAdjointEigenSolver<CMatrix> eigs(c);
  const double lambda_max = eigs.eigenvalues().maxCoeff();
  const double lambda_min = std::max(eigs.eigenvalues().minCoeff(), 0.0);
  if (!(lambda_max > 0.0))
    throw DegenerateModelError("update_mixing: coefficient matrix is zero");
  if (lambda_min / lambda_max < 1e-12) {
    const double ridge = ridge_rel * c.trace().real() / static_cast<double>(c.cols());
    if (!(ridge > 0.0) || (lambda_min + ridge) / (lambda_max + ridge) < 1e-14)
      throw DegenerateModelError("update_mixing: coefficient matrix is singular");
    c.diagonal().array() += ridge;
  }
  // A C = B with C Hermitian, so C A^H = B^H.
  return c.ldlt().solve(b.adjoint()).adjoint();
}

/// Gram matrix of the columns of khatri_rao(conj(A), A), computed in its
/// compact N x N form H = (A^H A) o (A^H A)^*. Real symmetric, positive
/// semidefinite.
inline RMatrix khatri_rao_gram(const CMatrix& a) {
  const CMatrix gram = a.adjoint() * a;
  return gram.cwiseAbs2();
}

/// Diagonal update: for fixed A each d_k solves H d_k = b_k with
/// b_k[n] = a_n^H R_k a_n. The K systems share one factorization of H. The
/// weights cancel from the stationarity condition, so they do not appear.
inline DiagonalSet update_diagonals(const CMatrix& a, const TargetSet& targets) {
  const auto n = a.cols();
  const RMatrix h = khatri_rao_gram(a);

  Eigen::SelfAdjointEigenSolver<RMatrix> eigs(h);
  const double lambda_max = eigs.eigenvalues().maxCoeff();
  if (!(lambda_max > 0.0) ||
      std::max(eigs.eigenvalues().minCoeff(), 0.0) <
          lambda_max * static_cast<double>(n) * 1e-15)
    throw DegenerateMixingError("update_diagonals: mixing matrix is rank deficient");

  const Eigen::LDLT<RMatrix> factorization(h);
  DiagonalSet out;
  out.reserve(targets.matrices.size());
  for (const auto& r : targets.matrices) {
    if (r.rows() != a.rows()) throw DimensionError("update_diagonals: shape mismatch");
    const CMatrix ra = r * a;
    CVector b(n);
    for (Eigen::Index i = 0; i < n; ++i) b(i) = a.col(i).dot(ra.col(i));
    const RVector re = factorization.solve(b.real());
    const RVector im = factorization.solve(b.imag());
    out.push_back(re + Complex(0.0, 1.0) * im);
  }
  return out;
}

/// The criterion being maximized: log sum_k exp(-e_k / 2 sigma^2), evaluated
/// in shifted form so large residuals cannot underflow the sum to zero.
inline double cost(const CMatrix& a, const DiagonalSet& d, const TargetSet& targets,
                   double sigma2) {
  const RVector e = residuals(targets, a, d);
  const double shift = e.minCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    sum += std::exp(-(e(i) - shift) / (2.0 * sigma2));
  return std::log(sum) - shift / (2.0 * sigma2);
}

/// Conjugate gradient of the criterion with respect to A, with sigma^2 held
/// fixed: dJ/dA^* = -(1 / 2 sigma^2) (A C(A) - B(A)) where C and B carry the
/// softmax weights evaluated at A. The log-sum-exp chain rule makes this the
/// exact gradient even though the weights themselves depend on A.
inline CMatrix cost_gradient(const CMatrix& a, const DiagonalSet& d, const TargetSet& targets,
                             double sigma2) {
  const RVector w = compute_weights(residuals(targets, a, d), sigma2);
  return (rhs_matrix(a, targets, d, w) - a * normal_matrix(a, d, w)) / (2.0 * sigma2);
}

/// Rescales each column of A to unit norm and absorbs the factor into the
/// diagonal coefficients; every product A Diag(d_k) A^H is unchanged. This
/// exploits the scale ambiguity of the model to keep A^H A well conditioned.
inline void rebalance(CMatrix& a, DiagonalSet& d) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double s = a.col(j).norm();
    if (!(s > 0.0)) throw DegenerateMixingError("rebalance: zero column in mixing matrix");
    a.col(j) /= s;
    const double s2 = s * s;
    for (auto& dk : d) dk(j) *= s2;
  }
}

namespace detail {

inline double median(RVector values) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values(n / 2) : 0.5 * (values(n / 2 - 1) + values(n / 2));
}

// The weighted-average sigma^2 rule can implode on its own: once the weights
// concentrate, sigma^2 chases the smallest residual, which concentrates the
// weights further until a single matrix carries all the mass and the run
// stalls. Bounding sigma^2 below by a fraction of the median residual breaks
// the feedback while leaving every healthy regime untouched: the guard can
// only bind when the weighted mean has dropped below the residual level of
// the panel majority.
inline double sigma2_lower_bound(const RVector& residuals_sq, double static_floor) {
  return std::max(static_floor, 0.5 * median(residuals_sq));
}

template <class Fn>
auto annotate_iteration(int t, Fn&& fn) {
  const auto tag = [t](const std::string& msg) {
    return "iteration " + std::to_string(t) + ": " + msg;
  };
  try {
    return fn();
  } catch (const DegenerateModelError& e) {
    throw DegenerateModelError(tag(e.what()));
  } catch (const DegenerateMixingError& e) {
    throw DegenerateMixingError(tag(e.what()));
  } catch (const NumericError& e) {
    throw NumericError(tag(e.what()));
  }
}

/// The shared alternating loop. `fixed_weights` switches off the softmax and
/// freezes the weight vector (the least-squares baseline); nullptr selects
/// soft decision-directed weighting.
inline RunResult run_alternating(const TargetSet& targets, const SolverConfig& config,
                                 const RVector* fixed_weights) {
  targets.validate();
  config.validate();
  const int m = targets.dim();
  const int n = targets.n_sources;
  const int count = targets.count();
  if (fixed_weights && fixed_weights->size() != count)
    throw DimensionError("run: fixed weight vector needs one entry per matrix");

  double data_scale = 0.0;
  for (const auto& r : targets.matrices) data_scale += r.squaredNorm();
  data_scale /= static_cast<double>(count);
  const double sigma2_floor =
      config.sigma2_floor_rel * (data_scale > 0.0 ? data_scale : 1.0);

  // Start from the leading N columns of the identity; the first diagonal
  // update then reads the top-left diagonals of the targets.
  CMatrix a = CMatrix::Identity(m, n);
  DiagonalSet d = update_diagonals(a, targets);
  RVector e = residuals(targets, a, d);
  RVector mu = fixed_weights ? *fixed_weights
                             : RVector::Constant(count, 1.0 / static_cast<double>(count));
  double sigma2 = std::max(e.mean(), detail::sigma2_lower_bound(e, sigma2_floor));

  RunResult result;
  const auto record = [&](int t, double step, const RVector& w, double pre_d, double post_d) {
    if (!config.record_trajectory) return;
    result.trajectory.push_back(
        {t, sigma2, cost(a, d, targets, sigma2), step, w, pre_d, post_d});
  };
  record(0, 0.0, mu, mu.dot(e), mu.dot(e));

  bool converged = false;
  int iterations = config.t_max;
  for (int t = 1; t <= config.t_max; ++t) {
    const CMatrix a_prev = a;

    e = residuals(targets, a, d);
    mu = fixed_weights ? *fixed_weights : compute_weights(e, sigma2);
    sigma2 = update_sigma2(mu, e, detail::sigma2_lower_bound(e, sigma2_floor));

    RVector mu_at_update = mu;
    detail::annotate_iteration(t, [&] {
      for (int i = 0; i < config.inner_a_updates; ++i) {
        mu_at_update = mu;
        a = update_mixing(a, targets, d, mu, config.ridge_rel);
        e = residuals(targets, a, d);
        mu = fixed_weights ? *fixed_weights : compute_weights(e, sigma2);
      }
      const double pre_d = mu.dot(e);
      d = update_diagonals(a, targets);
      double post_d = pre_d;
      if (config.record_trajectory) post_d = mu.dot(residuals(targets, a, d));
      if (config.rebalance_columns) rebalance(a, d);
      const double step = (a - a_prev).norm();
      record(t, step, mu_at_update, pre_d, post_d);
      if (step < config.epsilon) {
        converged = true;
        iterations = t;
      }
      return 0;
    });
    if (converged) break;
  }

  e = residuals(targets, a, d);
  mu = fixed_weights ? *fixed_weights : compute_weights(e, sigma2);
  sigma2 = update_sigma2(mu, e, detail::sigma2_lower_bound(e, sigma2_floor));

  result.mixing = std::move(a);
  result.diagonals = std::move(d);
  result.converged = converged;
  result.iterations = iterations;
  result.final_state = {std::move(e), std::move(mu), sigma2, iterations};
  return result;
}

}  // namespace detail

/// Runs the full alternating solver on a target set. Soft weighting is the
/// robust algorithm; uniform weighting reproduces the plain least-squares
/// scheme with weights 1/K.
inline RunResult solve(const TargetSet& targets, const SolverConfig& config = {}) {
  if (config.weighting == Weighting::Uniform) {
    const RVector w =
        RVector::Constant(targets.count(), 1.0 / static_cast<double>(targets.count()));
    return detail::run_alternating(targets, config, &w);
  }
  return detail::run_alternating(targets, config, nullptr);
}

}  // namespace sddjd
