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

#include "sddjd/solver.hpp"

namespace sddjd {

/// Configuration of the uniformly weighted least-squares baseline. The
/// weighting field of the embedded solver config is ignored: weights are
/// frozen at omega for the whole run. An empty omega means 1/K everywhere;
/// a supplied omega must be positive and is normalized to sum 1.
struct BaselineConfig {
  SolverConfig solver;
  RVector omega;
};

/// Alternating least squares with fixed weights: the identical loop to
/// solve(), with the softmax replaced by the constant weight vector. This is
/// the classic quadratic criterion the soft weighting generalizes, so the
/// pair gives an apples-to-apples robustness comparison.
inline RunResult solve_ls(const TargetSet& targets, const BaselineConfig& config = {}) {
  RVector w;
  if (config.omega.size() == 0) {
    w = RVector::Constant(targets.count(), 1.0 / static_cast<double>(targets.count()));
  } else {
    if (config.omega.size() != targets.count())
      throw DimensionError("solve_ls: omega needs one entry per matrix");
    if (!(config.omega.minCoeff() > 0.0))
      throw SpecError("solve_ls: omega entries must be positive");
    w = config.omega / config.omega.sum();
  }
  return detail::run_alternating(targets, config.solver, &w);
}

}  // namespace sddjd
