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
// Benchmark CLI for robust non-unitary joint diagonalization.
//
//   sddjd synth       generate a synthetic dataset file
//   sddjd run         run a solver on a dataset (file or inline spec)
//   sddjd sweep       grid x trials study, CSV/JSON output
//   sddjd trajectory  per-iteration weight study
//
// Exit codes: 0 success, 1 usage/spec error, 2 solver degeneracy, 3 I/O.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sddjd/sddjd.hpp"

namespace {

using namespace sddjd;

struct Options {
  int m = 6, n = 6, k = 20;
  std::vector<double> delta;
  std::optional<double> ner;
  double outlier_frac = 0.0;
  int trials = 20;
  std::uint64_t seed = 0;
  std::string algo = "sddjd,ls";
  double epsilon = 1e-4;
  int t_max = 1500;
  int inner_a = 1;
  std::string out;
  std::string format = "csv";
  std::string design;
  std::vector<double> grid;
  int jobs = 1;
  bool timing = false;
  bool trajectory_log = false;
  std::string config_path;
  std::string dataset;
};

// Parses "0.1,2,3e-4" into doubles; empty optional on any malformed item.
std::optional<std::vector<double>> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) return std::nullopt;
      out.push_back(v);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::vector<Algo> parse_algos(const std::string& text) {
  std::vector<Algo> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_algo(item));
  if (out.empty()) throw SpecError("no algorithm selected");
  return out;
}

// Values from a JSON config file fill any option the command line left at its
// default; explicit flags win.
void apply_config(Options& opt, const CLI::App& cmd) {
  if (opt.config_path.empty()) return;
  const Json doc = load_json(opt.config_path);
  const auto unset = [&](const std::string& flag) {
    const CLI::Option* o = cmd.get_option_no_throw(flag);
    return o == nullptr || o->count() == 0;
  };
  if (doc.contains("M") && unset("--M")) opt.m = doc["M"].get<int>();
  if (doc.contains("N") && unset("--N")) opt.n = doc["N"].get<int>();
  if (doc.contains("K") && unset("--K")) opt.k = doc["K"].get<int>();
  if (doc.contains("delta") && unset("--delta")) {
    if (doc["delta"].is_array())
      opt.delta = doc["delta"].get<std::vector<double>>();
    else
      opt.delta = {doc["delta"].get<double>()};
  }
  if (doc.contains("ner") && unset("--ner")) opt.ner = doc["ner"].get<double>();
  if (doc.contains("outlier_frac") && unset("--outlier-frac"))
    opt.outlier_frac = doc["outlier_frac"].get<double>();
  if (doc.contains("trials") && unset("--trials")) opt.trials = doc["trials"].get<int>();
  if (doc.contains("seed") && unset("--seed")) opt.seed = doc["seed"].get<std::uint64_t>();
  if (doc.contains("algorithms") && unset("--algo")) {
    std::string joined;
    for (const auto& a : doc["algorithms"]) {
      if (!joined.empty()) joined += ',';
      joined += a.get<std::string>();
    }
    opt.algo = joined;
  }
  if (doc.contains("epsilon") && unset("--epsilon")) opt.epsilon = doc["epsilon"].get<double>();
  if (doc.contains("t_max") && unset("--t-max")) opt.t_max = doc["t_max"].get<int>();
  if (doc.contains("inner_a") && unset("--inner-a")) opt.inner_a = doc["inner_a"].get<int>();
  if (doc.contains("out") && unset("--out")) opt.out = doc["out"].get<std::string>();
  if (doc.contains("format") && unset("--format")) opt.format = doc["format"].get<std::string>();
  if (doc.contains("design") && unset("--design")) opt.design = doc["design"].get<std::string>();
  if (doc.contains("grid") && unset("--grid")) opt.grid = doc["grid"].get<std::vector<double>>();
  if (doc.contains("jobs") && unset("--jobs")) opt.jobs = doc["jobs"].get<int>();
  if (doc.contains("timing") && unset("--timing")) opt.timing = doc["timing"].get<bool>();
}

std::vector<double> resolve_noise(const Options& opt) {
  if (opt.ner && !opt.delta.empty())
    throw SpecError("--ner and --delta are mutually exclusive");
  if (opt.ner) return {ner_to_delta(*opt.ner)};
  if (!opt.delta.empty()) return opt.delta;
  return {0.0};
}

SynthSpec make_synth_spec(const Options& opt) {
  SynthSpec spec;
  spec.rows = opt.m;
  spec.sources = opt.n;
  spec.count = opt.k;
  spec.noise_levels = resolve_noise(opt);
  spec.outlier_fraction = opt.outlier_frac;
  spec.seed = opt.seed;
  return spec;
}

SolverConfig make_solver_config(const Options& opt) {
  SolverConfig config;
  config.epsilon = opt.epsilon;
  config.t_max = opt.t_max;
  config.inner_a_updates = opt.inner_a;
  config.record_trajectory = opt.trajectory_log;
  return config;
}

ExperimentSpec make_experiment_spec(const Options& opt, Design design) {
  ExperimentSpec spec;
  spec.design = design;
  if (!opt.grid.empty()) spec.grid = opt.grid;
  spec.trials = opt.trials;
  spec.rows = opt.m;
  spec.sources = opt.n;
  spec.count = opt.k;
  spec.noise_levels = resolve_noise(opt);
  spec.outlier_fraction = opt.outlier_frac;
  spec.seed = opt.seed;
  spec.solver = make_solver_config(opt);
  spec.algorithms = parse_algos(opt.algo);
  spec.jobs = opt.jobs;
  spec.timing = opt.timing;
  return spec;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix + ".csv";
  return path.substr(0, dot) + suffix + path.substr(dot);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

int cmd_synth(const Options& opt) {
  const SynthSpec spec = make_synth_spec(opt);
  const TargetSet set = synthesize(spec);
  save_target_set(set, opt.out);
  int outliers = 0;
  for (const auto& tag : set.origin)
    if (tag.kind == MatrixOrigin::Kind::Outlier) ++outliers;
  std::cout << "wrote " << opt.out << ": M=" << set.dim() << " N=" << set.n_sources
            << " K=" << set.count() << " outliers=" << outliers << "\n";
  return 0;
}

int cmd_run(const Options& opt) {
  TargetSet targets =
      opt.dataset.empty() ? synthesize(make_synth_spec(opt)) : load_target_set(opt.dataset);
  const std::vector<Algo> algos = parse_algos(opt.algo);
  const SolverConfig config = make_solver_config(opt);

  for (const Algo algo : algos) {
    const auto start = std::chrono::steady_clock::now();
    const RunResult result = detail::run_algorithm(algo, targets, config);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::string path = opt.out.empty() ? "result.json" : opt.out;
    if (algos.size() > 1) path = with_suffix(path, "_" + to_string(algo));
    save_json(to_json(result, to_string(algo)), path);

    std::cout << "algo=" << to_string(algo);
    if (targets.truth) {
      std::cout << " grl="
                << format_double(global_rejection_level(gain(result.mixing, targets.truth->mixing)));
    }
    std::cout << " offdiag="
              << format_double(off_diagonality(pseudo_inverse(result.mixing), targets))
              << " iterations=" << result.iterations
              << " converged=" << (result.converged ? "true" : "false")
              << " seconds=" << format_double(seconds) << " out=" << path << "\n";
  }
  return 0;
}

int cmd_sweep(const Options& opt) {
  if (opt.design.empty()) throw SpecError("sweep needs --design (ner_sweep|outlier_sweep|single)");
  const Design design = parse_design(opt.design);
  if (design == Design::Trajectory)
    throw SpecError("use the trajectory subcommand for the trajectory design");
  const ExperimentSpec spec = make_experiment_spec(opt, design);
  const std::vector<SweepRow> rows = run_sweep(spec);
  const std::vector<SummaryRow> summary = summarize(spec, rows);

  const std::string out = opt.out.empty() ? "sweep.csv" : opt.out;
  if (opt.format == "json") {
    Json doc;
    doc["rows"] = Json::array();
    for (const auto& r : rows) doc["rows"].push_back(sweep_row_to_json(r));
    doc["summary"] = Json::array();
    for (const auto& s : summary) doc["summary"].push_back(summary_row_to_json(s));
    save_json(doc, out);
    std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
  } else if (opt.format == "csv") {
    std::ostringstream data, sum;
    write_sweep_csv(rows, data);
    write_summary_csv(summary, sum);
    write_text_file(out, data.str());
    const std::string summary_path = with_suffix(out, "_summary");
    write_text_file(summary_path, sum.str());
    std::cout << "wrote " << rows.size() << " rows to " << out << " and summary to "
              << summary_path << "\n";
  } else {
    throw SpecError("unknown format: " + opt.format);
  }
  return 0;
}

int cmd_trajectory(const Options& opt) {
  Options traj_opt = opt;
  if (traj_opt.delta.size() == 1)
    traj_opt.delta.assign(static_cast<size_t>(opt.k), traj_opt.delta.front());
  ExperimentSpec spec = make_experiment_spec(traj_opt, Design::Trajectory);
  const TrajectoryResult result = run_trajectory(spec);

  const std::string out = opt.out.empty() ? "trajectory.csv" : opt.out;
  if (opt.format == "json") {
    Json doc;
    doc["trajectory"] = Json::array();
    for (const auto& rec : result.records) {
      Json mu = Json::array();
      for (Eigen::Index i = 0; i < rec.weights.size(); ++i) mu.push_back(rec.weights(i));
      doc["trajectory"].push_back(
          {{"t", rec.t}, {"sigma2", rec.sigma2}, {"cost", rec.cost}, {"mu", std::move(mu)}});
    }
    doc["final_weights"] = Json::array();
    for (Eigen::Index i = 0; i < result.mean_final_weights.size(); ++i)
      doc["final_weights"].push_back({{"k", i + 1},
                                      {"delta", result.deltas[static_cast<size_t>(i)]},
                                      {"mu_final_mean", result.mean_final_weights(i)}});
    save_json(doc, out);
    std::cout << "wrote trajectory (" << result.records.size() << " states) to " << out << "\n";
  } else if (opt.format == "csv") {
    std::ostringstream traj, finals;
    write_trajectory_csv(result, traj);
    write_final_weights_csv(result, finals);
    write_text_file(out, traj.str());
    const std::string finals_path = with_suffix(out, "_final_weights");
    write_text_file(finals_path, finals.str());
    std::cout << "wrote trajectory (" << result.records.size() << " states) to " << out
              << " and final weights to " << finals_path << "\n";
  } else {
    throw SpecError("unknown format: " + opt.format);
  }
  return 0;
}

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--M", opt.m, "target matrix dimension");
  cmd->add_option("--N", opt.n, "source count (mixing matrix columns)");
  cmd->add_option("--K", opt.k, "number of target matrices");
  cmd->add_option("--delta", [&opt](const std::vector<std::string>& vals) {
        const auto parsed = parse_double_list(vals.back());
        if (parsed) opt.delta = *parsed;
        return parsed.has_value();
      },
      "noise level, scalar or comma list (one per matrix)");
  cmd->add_option("--ner", [&opt](const std::vector<std::string>& vals) {
        const auto parsed = parse_double_list(vals.back());
        if (!parsed || parsed->size() != 1) return false;
        opt.ner = parsed->front();
        return true;
      },
      "noise-to-error ratio in dB (alternative to --delta)");
  cmd->add_option("--outlier-frac", opt.outlier_frac, "fraction of matrices replaced by outliers");
  cmd->add_option("--trials", opt.trials, "trials per grid point");
  cmd->add_option("--seed", opt.seed, "master seed");
  cmd->add_option("--algo", opt.algo, "algorithms: sddjd, ls, or comma list");
  cmd->add_option("--epsilon", opt.epsilon, "convergence tolerance on the mixing-matrix step");
  cmd->add_option("--t-max", opt.t_max, "maximum outer iterations");
  cmd->add_option("--inner-a", opt.inner_a, "mixing updates per outer iteration");
  cmd->add_option("--out", opt.out, "output path");
  cmd->add_option("--format", opt.format, "output format: csv or json");
  cmd->add_option("--jobs", opt.jobs, "parallel workers over sweep cells");
  cmd->add_flag("--timing", opt.timing,
                "fill wall_seconds columns (off keeps output byte-reproducible)");
  cmd->add_option("--config", opt.config_path, "JSON config file; explicit flags override it");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust non-unitary joint diagonalization benchmark"};
  app.require_subcommand(1);

  Options opt;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common_flags(synth, opt);
  CLI::App* run = app.add_subcommand("run", "run solver(s) on a dataset or inline spec");
  run->add_option("dataset", opt.dataset, "dataset JSON (omit to synthesize from flags)");
  run->add_flag("--log-trajectory", opt.trajectory_log, "include the trajectory in result JSON");
  add_common_flags(run, opt);
  CLI::App* sweep = app.add_subcommand("sweep", "grid x trials experiment");
  sweep->add_option("--design", opt.design, "ner_sweep | outlier_sweep | single");
  sweep->add_option("--grid", [&opt](const std::vector<std::string>& vals) {
        const auto parsed = parse_double_list(vals.back());
        if (parsed) opt.grid = *parsed;
        return parsed.has_value();
      },
      "swept values, comma list");
  add_common_flags(sweep, opt);
  CLI::App* trajectory = app.add_subcommand("trajectory", "per-iteration weight study");
  add_common_flags(trajectory, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      apply_config(opt, *synth);
      if (opt.out.empty()) throw SpecError("synth needs --out");
      return cmd_synth(opt);
    }
    if (run->parsed()) {
      apply_config(opt, *run);
      return cmd_run(opt);
    }
    if (sweep->parsed()) {
      apply_config(opt, *sweep);
      return cmd_sweep(opt);
    }
    if (trajectory->parsed()) {
      apply_config(opt, *trajectory);
      return cmd_trajectory(opt);
    }
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
