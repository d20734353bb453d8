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

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sddjd/solver.hpp"
#include "sddjd/types.hpp"

namespace sddjd {

using Json = nlohmann::json;

// --- complex encoding -------------------------------------------------------
//
// Matrices and vectors are stored as flat arrays of [re, im] pairs, matrices
// in column-major order. Dimensions come from the surrounding document.

inline Json matrix_to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      out.push_back({m(i, j).real(), m(i, j).imag()});
  return out;
}

inline Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

inline CMatrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
    throw IoError("matrix entry count does not match dimensions");
  CMatrix out(rows, cols);
  Eigen::Index idx = 0;
  for (Eigen::Index j2 = 0; j2 < cols; ++j2)
    for (Eigen::Index i = 0; i < rows; ++i, ++idx) {
      const auto& pair = j[static_cast<size_t>(idx)];
      if (!pair.is_array() || pair.size() != 2)
        throw IoError("complex entries must be [re, im] pairs");
      out(i, j2) = Complex(pair[0].get<double>(), pair[1].get<double>());
    }
  return out;
}

inline CVector vector_from_json(const Json& j, Eigen::Index size) {
  const CMatrix m = matrix_from_json(j, size, 1);
  return m.col(0);
}

// --- target sets -------------------------------------------------------------

inline Json origin_to_json(const MatrixOrigin& o) {
  switch (o.kind) {
    case MatrixOrigin::Kind::Clean:
      return Json{{"kind", "clean"}};
    case MatrixOrigin::Kind::Noisy:
      return Json{{"kind", "noisy"}, {"delta", o.delta}};
    case MatrixOrigin::Kind::Outlier:
      return Json{{"kind", "outlier"}};
  }
  throw IoError("unknown origin tag");
}

inline MatrixOrigin origin_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "clean") return {MatrixOrigin::Kind::Clean, 0.0};
  if (kind == "noisy") return {MatrixOrigin::Kind::Noisy, j.at("delta").get<double>()};
  if (kind == "outlier") return {MatrixOrigin::Kind::Outlier, 0.0};
  throw IoError("unknown origin tag: " + kind);
}

inline Json to_json(const TargetSet& set) {
  Json doc;
  doc["M"] = set.dim();
  doc["N"] = set.n_sources;
  doc["K"] = set.count();
  doc["seed"] = set.seed;
  Json mats = Json::array();
  for (const auto& r : set.matrices) mats.push_back(matrix_to_json(r));
  doc["matrices"] = std::move(mats);
  if (set.origin.empty()) {
    doc["origin"] = nullptr;
  } else {
    Json o = Json::array();
    for (const auto& tag : set.origin) o.push_back(origin_to_json(tag));
    doc["origin"] = std::move(o);
  }
  if (set.truth) {
    Json d = Json::array();
    for (const auto& dk : set.truth->diagonals) d.push_back(vector_to_json(dk));
    doc["truth"] = Json{{"A", matrix_to_json(set.truth->mixing)}, {"D", std::move(d)}};
  } else {
    doc["truth"] = nullptr;
  }
  return doc;
}

inline TargetSet target_set_from_json(const Json& doc) {
  TargetSet set;
  const auto m = doc.at("M").get<Eigen::Index>();
  set.n_sources = doc.at("N").get<int>();
  const auto count = doc.at("K").get<Eigen::Index>();
  if (set.n_sources < 2 || set.n_sources > m)
    throw SpecError("source count must satisfy 2 <= N <= M");
  set.seed = doc.value("seed", std::uint64_t{0});
  const auto& mats = doc.at("matrices");
  if (!mats.is_array() || static_cast<Eigen::Index>(mats.size()) != count)
    throw IoError("matrix list does not match K");
  for (const auto& entry : mats) set.matrices.push_back(matrix_from_json(entry, m, m));
  if (doc.contains("origin") && !doc.at("origin").is_null())
    for (const auto& entry : doc.at("origin")) set.origin.push_back(origin_from_json(entry));
  if (doc.contains("truth") && !doc.at("truth").is_null()) {
    GroundTruth truth;
    truth.mixing = matrix_from_json(doc.at("truth").at("A"), m, set.n_sources);
    for (const auto& entry : doc.at("truth").at("D"))
      truth.diagonals.push_back(vector_from_json(entry, set.n_sources));
    set.truth = std::move(truth);
  }
  set.validate();
  return set;
}

// --- run results --------------------------------------------------------------

inline Json to_json(const RunResult& result, const std::string& algorithm = "") {
  Json doc;
  doc["M"] = result.mixing.rows();
  doc["N"] = result.mixing.cols();
  doc["K"] = result.diagonals.size();
  if (!algorithm.empty()) doc["algorithm"] = algorithm;
  doc["A_hat"] = matrix_to_json(result.mixing);
  Json d = Json::array();
  for (const auto& dk : result.diagonals) d.push_back(vector_to_json(dk));
  doc["D_hat"] = std::move(d);
  doc["converged"] = result.converged;
  doc["iterations"] = result.iterations;
  Json mu = Json::array();
  for (Eigen::Index i = 0; i < result.final_state.weights.size(); ++i)
    mu.push_back(result.final_state.weights(i));
  doc["mu"] = std::move(mu);
  doc["sigma2"] = result.final_state.sigma2;
  if (result.trajectory.empty()) {
    doc["trajectory"] = nullptr;
  } else {
    Json rows = Json::array();
    for (const auto& rec : result.trajectory) {
      Json w = Json::array();
      for (Eigen::Index i = 0; i < rec.weights.size(); ++i) w.push_back(rec.weights(i));
      rows.push_back({{"t", rec.t},
                      {"sigma2", rec.sigma2},
                      {"cost", rec.cost},
                      {"step", rec.step_norm},
                      {"mu", std::move(w)}});
    }
    doc["trajectory"] = std::move(rows);
  }
  return doc;
}

// --- files ----------------------------------------------------------------------

inline void save_json(const Json& doc, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline Json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  Json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw IoError("invalid JSON in " + path + ": " + e.what());
  }
  return doc;
}

inline void save_target_set(const TargetSet& set, const std::string& path) {
  save_json(to_json(set), path);
}

inline TargetSet load_target_set(const std::string& path) {
  return target_set_from_json(load_json(path));
}

// --- CSV ------------------------------------------------------------------------

/// Shortest representation that round-trips a double exactly.
inline std::string format_double(double value) {
  char best[64];
  std::snprintf(best, sizeof(best), "%.17g", value);
  for (int precision = 1; precision < 17; ++precision) {
    char candidate[64];
    std::snprintf(candidate, sizeof(candidate), "%.*g", precision, value);
    if (std::strlen(candidate) < std::strlen(best) &&
        std::strtod(candidate, nullptr) == value)
      std::memcpy(best, candidate, sizeof(candidate));
  }
  return best;
}

inline std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

}  // namespace sddjd
