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

#include <catch2/catch.hpp>
#include <cstdio>

#include "test_support.hpp"

using namespace sddjd;

TEST_CASE("target sets round-trip through JSON bit for bit") {
  SynthSpec spec;
  spec.rows = 5;
  spec.sources = 4;
  spec.count = 6;
  spec.noise_levels = {0.03};
  spec.outlier_fraction = 0.34;
  spec.seed = 909;
  const TargetSet original = synthesize(spec);
  const TargetSet copy = target_set_from_json(to_json(original));

  REQUIRE(copy.n_sources == original.n_sources);
  REQUIRE(copy.seed == original.seed);
  REQUIRE(copy.count() == original.count());
  for (int k = 0; k < original.count(); ++k) {
    const auto& a = original.matrices[static_cast<size_t>(k)];
    const auto& b = copy.matrices[static_cast<size_t>(k)];
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      REQUIRE(a(i).real() == b(i).real());
      REQUIRE(a(i).imag() == b(i).imag());
    }
    REQUIRE(copy.origin[static_cast<size_t>(k)] == original.origin[static_cast<size_t>(k)]);
  }
  REQUIRE(copy.truth.has_value());
  REQUIRE((copy.truth->mixing - original.truth->mixing).norm() == 0.0);
  for (size_t k = 0; k < original.truth->diagonals.size(); ++k)
    REQUIRE((copy.truth->diagonals[k] - original.truth->diagonals[k]).norm() == 0.0);
}

TEST_CASE("target set JSON carries the documented fields") {
  SynthSpec spec;
  spec.rows = 4;
  spec.sources = 3;
  spec.count = 4;
  spec.seed = 5;
  const Json doc = to_json(synthesize(spec));
  REQUIRE(doc.at("M") == 4);
  REQUIRE(doc.at("N") == 3);
  REQUIRE(doc.at("K") == 4);
  REQUIRE(doc.at("seed") == 5);
  REQUIRE(doc.at("matrices").is_array());
  REQUIRE(doc.at("matrices").size() == 4);
  REQUIRE(doc.at("matrices")[0].size() == 16);
  REQUIRE(doc.at("matrices")[0][0].size() == 2);
  REQUIRE(doc.at("origin").is_array());
  REQUIRE(doc.at("truth").is_object());
  REQUIRE(doc.at("truth").at("A").size() == 12);
  REQUIRE(doc.at("truth").at("D").size() == 4);
}

TEST_CASE("a dataset without truth still loads") {
  SynthSpec spec;
  spec.rows = 4;
  spec.sources = 3;
  spec.count = 4;
  spec.seed = 6;
  Json doc = to_json(synthesize(spec));
  doc["truth"] = nullptr;
  doc["origin"] = nullptr;
  const TargetSet set = target_set_from_json(doc);
  REQUIRE_FALSE(set.truth.has_value());
  REQUIRE(set.origin.empty());
  REQUIRE(set.count() == 4);
}

TEST_CASE("malformed documents are rejected") {
  SynthSpec spec;
  spec.rows = 4;
  spec.sources = 3;
  spec.count = 4;
  spec.seed = 7;
  const Json good = to_json(synthesize(spec));

  SECTION("wrong matrix count") {
    Json doc = good;
    doc["K"] = 5;
    REQUIRE_THROWS_AS(target_set_from_json(doc), IoError);
  }
  SECTION("wrong entry count") {
    Json doc = good;
    doc["matrices"][0].erase(0);
    REQUIRE_THROWS_AS(target_set_from_json(doc), IoError);
  }
  SECTION("non-finite entry") {
    Json doc = good;
    doc["matrices"][0][0][0] = "oops";
    REQUIRE_THROWS(target_set_from_json(doc));
  }
  SECTION("bad source count") {
    Json doc = good;
    doc["N"] = 1;
    REQUIRE_THROWS_AS(target_set_from_json(doc), SpecError);
  }
}

TEST_CASE("run results serialize with the documented fields") {
  SynthSpec spec;
  spec.rows = 4;
  spec.sources = 4;
  spec.count = 5;
  spec.noise_levels = {0.05};
  spec.seed = 77;
  const TargetSet ts = synthesize(spec);
  SolverConfig config;
  config.record_trajectory = true;
  config.t_max = 20;
  const RunResult result = solve(ts, config);
  const Json doc = to_json(result, "sddjd");

  REQUIRE(doc.at("algorithm") == "sddjd");
  REQUIRE(doc.at("A_hat").size() == 16);
  REQUIRE(doc.at("D_hat").size() == 5);
  REQUIRE(doc.at("D_hat")[0].size() == 4);
  REQUIRE(doc.at("converged").is_boolean());
  REQUIRE(doc.at("iterations").get<int>() == result.iterations);
  REQUIRE(doc.at("mu").size() == 5);
  REQUIRE(doc.at("sigma2").get<double>() == result.final_state.sigma2);
  REQUIRE(doc.at("trajectory").is_array());
  REQUIRE(doc.at("trajectory").size() == result.trajectory.size());
  REQUIRE(doc.at("trajectory")[0].contains("mu"));

  // without trajectory logging the field is null
  SolverConfig quiet;
  const Json doc2 = to_json(solve(ts, quiet), "sddjd");
  REQUIRE(doc2.at("trajectory").is_null());
}

TEST_CASE("file save and load round-trips") {
  SynthSpec spec;
  spec.rows = 4;
  spec.sources = 3;
  spec.count = 4;
  spec.seed = 8;
  const TargetSet original = synthesize(spec);
  const std::string path = "test_io_roundtrip.json";
  save_target_set(original, path);
  const TargetSet loaded = load_target_set(path);
  REQUIRE((loaded.matrices[0] - original.matrices[0]).norm() == 0.0);
  std::remove(path.c_str());

  REQUIRE_THROWS_AS(load_target_set("does_not_exist_anywhere.json"), IoError);
}

TEST_CASE("format_double round-trips and is compact") {
  for (double v : {0.0, 1.0, -1.0, 0.1, 1e-300, 3.141592653589793, 1e17, -2.5e-8}) {
    const std::string s = format_double(v);
    REQUIRE(std::strtod(s.c_str(), nullptr) == v);
  }
  REQUIRE(format_double(1.0) == "1");
  REQUIRE(format_double(0.5) == "0.5");
  const std::string nan_text = format_double(std::numeric_limits<double>::quiet_NaN());
  REQUIRE(nan_text == "nan");
}

TEST_CASE("csv escaping") {
  REQUIRE(csv_escape("plain") == "plain");
  REQUIRE(csv_escape("a,b") == "\"a,b\"");
  REQUIRE(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("format_double prefers plain decimal forms") {
  REQUIRE(format_double(10.0) == "10");
  REQUIRE(format_double(40.0) == "40");
  REQUIRE(format_double(0.125) == "0.125");
  REQUIRE(format_double(1e-30) == "1e-30");
}
