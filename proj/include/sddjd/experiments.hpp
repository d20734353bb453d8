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
// Experiment harness: seeded Monte Carlo sweeps over noise level or outlier
// fraction, weight-trajectory studies, and their CSV/JSON emission. Cells are
// keyed by (grid index, trial index) RNG substreams and results are written
// in a fixed order, so serial and parallel executions produce identical
// bytes.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "sddjd/baseline.hpp"
#include "sddjd/io.hpp"
#include "sddjd/metrics.hpp"
#include "sddjd/solver.hpp"
#include "sddjd/synthesis.hpp"

namespace sddjd {

enum class Design { NerSweep, OutlierSweep, Trajectory, Single };
enum class Algo { Sddjd, Ls };

inline std::string to_string(Design d) {
  switch (d) {
    case Design::NerSweep: return "ner_sweep";
    case Design::OutlierSweep: return "outlier_sweep";
    case Design::Trajectory: return "trajectory";
    case Design::Single: return "single";
  }
  throw SpecError("unknown design");
}

inline Design parse_design(const std::string& s) {
  if (s == "ner_sweep") return Design::NerSweep;
  if (s == "outlier_sweep") return Design::OutlierSweep;
  if (s == "trajectory") return Design::Trajectory;
  if (s == "single") return Design::Single;
  throw SpecError("unknown design: " + s);
}

inline std::string to_string(Algo a) { return a == Algo::Sddjd ? "sddjd" : "ls"; }

inline Algo parse_algo(const std::string& s) {
  if (s == "sddjd") return Algo::Sddjd;
  if (s == "ls") return Algo::Ls;
  throw SpecError("unknown algorithm: " + s);
}

struct ExperimentSpec {
  Design design = Design::Single;
  std::vector<double> grid{0.0};       // NER values in dB, or outlier fractions
  int trials = 20;
  int rows = 6;                        // M
  int sources = 6;                     // N
  int count = 20;                      // K
  std::vector<double> noise_levels{0.0};
  double outlier_fraction = 0.0;
  std::uint64_t seed = 0;
  SolverConfig solver;
  std::vector<Algo> algorithms{Algo::Sddjd, Algo::Ls};
  int jobs = 1;
  bool timing = false;  // fill wall_seconds; off by default to keep output deterministic

  void validate() const {
    if (grid.empty()) throw SpecError("experiment grid must be non-empty");
    if (trials < 1) throw SpecError("need at least one trial");
    if (algorithms.empty()) throw SpecError("need at least one algorithm");
    if (jobs < 1) throw SpecError("need at least one worker");
  }
};

struct SweepRow {
  std::string design;
  double grid_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;  // the per-cell dataset seed, shared by all algorithms
  std::string algorithm;
  double grl = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
  double final_sigma2 = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

struct SummaryRow {
  std::string design;
  double grid_value = 0.0;
  std::string algorithm;
  int n = 0;  // rows that produced a result
  double grl_mean = 0.0, grl_median = 0.0, grl_iqr = 0.0;
  double iterations_mean = 0.0, iterations_median = 0.0, iterations_iqr = 0.0;
};

namespace detail {

// Quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(h));
  const auto hi = static_cast<size_t>(std::ceil(h));
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline double mean(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

inline SynthSpec cell_synth_spec(const ExperimentSpec& spec, size_t grid_index, int trial) {
  SynthSpec synth;
  synth.rows = spec.rows;
  synth.sources = spec.sources;
  synth.count = spec.count;
  synth.noise_levels = spec.noise_levels;
  synth.outlier_fraction = spec.outlier_fraction;
  if (spec.design == Design::NerSweep)
    synth.noise_levels = {ner_to_delta(spec.grid[grid_index])};
  else if (spec.design == Design::OutlierSweep)
    synth.outlier_fraction = spec.grid[grid_index];
  synth.seed = derive_stream(spec.seed, {static_cast<std::uint64_t>(grid_index),
                                         static_cast<std::uint64_t>(trial)});
  return synth;
}

inline RunResult run_algorithm(Algo algo, const TargetSet& targets, SolverConfig config) {
  if (algo == Algo::Sddjd) {
    config.weighting = Weighting::Soft;
    return solve(targets, config);
  }
  return solve_ls(targets, BaselineConfig{config, {}});
}

template <class Work>
inline void parallel_cells(int n_cells, int jobs, Work&& work) {
  if (jobs <= 1) {
    for (int c = 0; c < n_cells; ++c) work(c);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  const int n_workers = std::min(jobs, n_cells);
  workers.reserve(static_cast<size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      try {
        for (int c = next.fetch_add(1); c < n_cells; c = next.fetch_add(1)) work(c);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

/// Runs the full grid x trial x algorithm study. Every cell synthesizes a
/// fresh dataset from its own substream and hands the identical dataset to
/// each algorithm, so per-cell comparisons are paired. A solver failure in
/// one cell is recorded on its row and the sweep continues.
inline std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.design == Design::Trajectory)
    throw SpecError("run_sweep: use run_trajectory for the trajectory design");

  const int n_grid = static_cast<int>(spec.grid.size());
  const int n_cells = n_grid * spec.trials;
  const int n_algos = static_cast<int>(spec.algorithms.size());
  std::vector<SweepRow> rows(static_cast<size_t>(n_cells) * static_cast<size_t>(n_algos));

  detail::parallel_cells(n_cells, spec.jobs, [&](int cell) {
    const auto grid_index = static_cast<size_t>(cell / spec.trials);
    const int trial = cell % spec.trials;
    const SynthSpec synth = detail::cell_synth_spec(spec, grid_index, trial);

    for (int ai = 0; ai < n_algos; ++ai) {
      SweepRow row;
      row.design = to_string(spec.design);
      row.grid_value = spec.grid[grid_index];
      row.trial = trial;
      row.seed = synth.seed;
      row.algorithm = to_string(spec.algorithms[static_cast<size_t>(ai)]);
      try {
        const TargetSet targets = synthesize(synth);
        const auto start = std::chrono::steady_clock::now();
        const RunResult result =
            detail::run_algorithm(spec.algorithms[static_cast<size_t>(ai)], targets, spec.solver);
        if (spec.timing) {
          row.wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        row.grl = global_rejection_level(gain(result.mixing, targets.truth->mixing));
        row.iterations = result.iterations;
        row.converged = result.converged;
        row.final_sigma2 = result.final_state.sigma2;
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows[static_cast<size_t>(cell) * static_cast<size_t>(n_algos) + static_cast<size_t>(ai)] =
          std::move(row);
    }
  });
  return rows;
}

/// Per (grid value, algorithm) mean, median, and interquartile range of GRL
/// and iteration count, over rows that produced a result.
inline std::vector<SummaryRow> summarize(const ExperimentSpec& spec,
                                         const std::vector<SweepRow>& rows) {
  std::vector<SummaryRow> out;
  for (size_t g = 0; g < spec.grid.size(); ++g) {
    for (const Algo algo : spec.algorithms) {
      SummaryRow s;
      s.design = to_string(spec.design);
      s.grid_value = spec.grid[g];
      s.algorithm = to_string(algo);
      std::vector<double> grls, iters;
      for (const auto& row : rows) {
        if (row.grid_value == spec.grid[g] && row.algorithm == s.algorithm && row.error.empty()) {
          grls.push_back(row.grl);
          iters.push_back(static_cast<double>(row.iterations));
        }
      }
      s.n = static_cast<int>(grls.size());
      s.grl_mean = detail::mean(grls);
      s.grl_median = detail::quantile(grls, 0.5);
      s.grl_iqr = detail::quantile(grls, 0.75) - detail::quantile(grls, 0.25);
      s.iterations_mean = detail::mean(iters);
      s.iterations_median = detail::quantile(iters, 0.5);
      s.iterations_iqr = detail::quantile(iters, 0.75) - detail::quantile(iters, 0.25);
      out.push_back(std::move(s));
    }
  }
  return out;
}

// --- trajectory study --------------------------------------------------------

struct TrajectoryResult {
  std::vector<IterationRecord> records;  // first trial, includes the t = 0 state
  std::vector<double> deltas;            // per-matrix noise levels
  RVector mean_final_weights;            // averaged over trials
  int trials = 0;
};

/// Runs the soft solver on the per-matrix noise design and collects the
/// weight trajectory of the first trial plus final weights averaged over all
/// trials.
inline TrajectoryResult run_trajectory(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.noise_levels.size() != static_cast<size_t>(spec.count))
    throw SpecError("run_trajectory: need one noise level per matrix");

  TrajectoryResult out;
  out.deltas = spec.noise_levels;
  out.trials = spec.trials;
  out.mean_final_weights = RVector::Zero(spec.count);

  std::vector<RVector> finals(static_cast<size_t>(spec.trials));
  detail::parallel_cells(spec.trials, spec.jobs, [&](int trial) {
    SynthSpec synth = detail::cell_synth_spec(spec, 0, trial);
    SolverConfig config = spec.solver;
    config.weighting = Weighting::Soft;
    config.record_trajectory = (trial == 0);
    const RunResult result = solve(synthesize(synth), config);
    finals[static_cast<size_t>(trial)] = result.final_state.weights;
    if (trial == 0) out.records = result.trajectory;
  });
  for (const auto& w : finals) out.mean_final_weights += w;
  out.mean_final_weights /= static_cast<double>(spec.trials);
  return out;
}

// --- CSV / JSON emission -------------------------------------------------------

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

inline const char* sweep_csv_header() {
  return "design,grid_value,trial,seed,algorithm,grl,iterations,converged,"
         "wall_seconds,final_sigma2,error";
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << sweep_csv_header() << '\n';
  for (const auto& r : rows) {
    os << join_csv({r.design, format_double(r.grid_value), std::to_string(r.trial),
                    std::to_string(r.seed), r.algorithm, format_double(r.grl),
                    std::to_string(r.iterations), r.converged ? "true" : "false",
                    format_double(r.wall_seconds), format_double(r.final_sigma2),
                    csv_escape(r.error)})
       << '\n';
  }
}

inline const char* summary_csv_header() {
  return "design,grid_value,algorithm,n,grl_mean,grl_median,grl_iqr,"
         "iterations_mean,iterations_median,iterations_iqr";
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& os) {
  os << summary_csv_header() << '\n';
  for (const auto& r : rows) {
    os << join_csv({r.design, format_double(r.grid_value), r.algorithm, std::to_string(r.n),
                    format_double(r.grl_mean), format_double(r.grl_median),
                    format_double(r.grl_iqr), format_double(r.iterations_mean),
                    format_double(r.iterations_median), format_double(r.iterations_iqr)})
       << '\n';
  }
}

inline void write_trajectory_csv(const TrajectoryResult& result, std::ostream& os) {
  const auto k = static_cast<Eigen::Index>(result.deltas.size());
  std::vector<std::string> header{"t", "sigma2", "cost"};
  for (Eigen::Index i = 0; i < k; ++i) header.push_back("mu_" + std::to_string(i + 1));
  os << join_csv(header) << '\n';
  for (const auto& rec : result.records) {
    std::vector<std::string> fields{std::to_string(rec.t), format_double(rec.sigma2),
                                    format_double(rec.cost)};
    for (Eigen::Index i = 0; i < rec.weights.size(); ++i)
      fields.push_back(format_double(rec.weights(i)));
    os << join_csv(fields) << '\n';
  }
}

inline void write_final_weights_csv(const TrajectoryResult& result, std::ostream& os) {
  os << "k,delta_k,mu_final_mean\n";
  for (Eigen::Index i = 0; i < result.mean_final_weights.size(); ++i) {
    os << join_csv({std::to_string(i + 1), format_double(result.deltas[static_cast<size_t>(i)]),
                    format_double(result.mean_final_weights(i))})
       << '\n';
  }
}

inline Json sweep_row_to_json(const SweepRow& r) {
  return Json{{"design", r.design},
              {"grid_value", r.grid_value},
              {"trial", r.trial},
              {"seed", r.seed},
              {"algorithm", r.algorithm},
              {"grl", r.grl},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"wall_seconds", r.wall_seconds},
              {"final_sigma2", r.final_sigma2},
              {"error", r.error}};
}

inline Json summary_row_to_json(const SummaryRow& r) {
  return Json{{"design", r.design},
              {"grid_value", r.grid_value},
              {"algorithm", r.algorithm},
              {"n", r.n},
              {"grl_mean", r.grl_mean},
              {"grl_median", r.grl_median},
              {"grl_iqr", r.grl_iqr},
              {"iterations_mean", r.iterations_mean},
              {"iterations_median", r.iterations_median},
              {"iterations_iqr", r.iterations_iqr}};
}

}  // namespace sddjd
