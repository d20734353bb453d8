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

#include "test_support.hpp"

using namespace sddjd;
using namespace testsupport;

namespace {

// Random generalized permutation: one nonzero complex entry per row and
// column with magnitude in [lo, hi].
CMatrix random_generalized_permutation(std::mt19937& gen, int n, double lo, double hi) {
  std::vector<int> perm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  std::uniform_real_distribution<double> mag(lo, hi);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979);
  CMatrix g = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    g(perm[static_cast<size_t>(i)], i) = std::polar(mag(gen), phase(gen));
  return g;
}

}  // namespace

TEST_CASE("pseudo-inverse basics") {
  std::mt19937 gen(51);
  SECTION("identity") {
    REQUIRE((pseudo_inverse(CMatrix::Identity(4, 4)) - CMatrix::Identity(4, 4)).norm() < 1e-12);
  }
  SECTION("square invertible matches a dense solve") {
    const CMatrix a = random_complex(gen, 5, 5);
    const CMatrix inv = a.fullPivLu().inverse();
    REQUIRE((pseudo_inverse(a) - inv).norm() <= 1e-9 * inv.norm());
  }
  SECTION("tall orthonormal columns give the adjoint") {
    CMatrix a = CMatrix::Zero(6, 3);
    for (int j = 0; j < 3; ++j) a(j, j) = 1.0;
    REQUIRE((pseudo_inverse(a) - a.adjoint()).norm() < 1e-12);
  }
  SECTION("zero matrix maps to zero") {
    REQUIRE(pseudo_inverse(CMatrix::Zero(3, 2)).norm() == 0.0);
  }
}

TEST_CASE("pseudo-inverse satisfies the Penrose conditions") {
  std::mt19937 gen(52);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + static_cast<int>(gen() % 9);
    const int n = 2 + static_cast<int>(gen() % 9);
    const CMatrix a = random_complex(gen, m, n);
    const CMatrix p = pseudo_inverse(a);
    REQUIRE((a * p * a - a).norm() <= 1e-9 * a.norm());
    REQUIRE((p * a * p - p).norm() <= 1e-9 * p.norm());
    REQUIRE(((a * p) - (a * p).adjoint()).norm() <= 1e-9 * (a * p).norm() + 1e-12);
    REQUIRE(((p * a) - (p * a).adjoint()).norm() <= 1e-9 * (p * a).norm() + 1e-12);
  }
}

TEST_CASE("gain of a perfect estimate is the identity") {
  std::mt19937 gen(53);
  const CMatrix a = normalize_columns(random_complex(gen, 6, 4));
  REQUIRE((gain(a, a) - CMatrix::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("gain of a permuted scaled estimate is the inverse generalized permutation") {
  std::mt19937 gen(54);
  const CMatrix a = normalize_columns(random_complex(gen, 6, 4));
  // permutation matrix P and diagonal scaling L
  CMatrix p = CMatrix::Zero(4, 4);
  p(0, 2) = 1;
  p(1, 0) = 1;
  p(2, 3) = 1;
  p(3, 1) = 1;
  CVector scale(4);
  scale << Complex(2, 0), Complex(0, 1), Complex(-0.5, 0.5), Complex(1.5, -0.2);
  const CMatrix a_hat = a * p * scale.asDiagonal();
  const CMatrix g = gain(a_hat, a);
  const CMatrix expected =
      CMatrix(scale.asDiagonal()).fullPivLu().inverse() * p.transpose();
  REQUIRE((g - expected).norm() <= 1e-9 * expected.norm());
  REQUIRE(global_rejection_level(g) < 1e-12);
}

TEST_CASE("gain matches a normal-equations oracle") {
  std::mt19937 gen(55);
  const CMatrix a_hat = random_complex(gen, 7, 4);
  const CMatrix a_true = random_complex(gen, 7, 4);
  const CMatrix g = gain(a_hat, a_true);
  const CMatrix oracle =
      (a_hat.adjoint() * a_hat).fullPivLu().solve(a_hat.adjoint() * a_true);
  REQUIRE((g - oracle).norm() <= 1e-9 * oracle.norm());
}

TEST_CASE("gain rejects shape mismatches") {
  std::mt19937 gen(56);
  REQUIRE_THROWS_AS(gain(random_complex(gen, 4, 3), random_complex(gen, 4, 2)), DimensionError);
}

TEST_CASE("global rejection level closed forms") {
  REQUIRE(global_rejection_level(CMatrix::Identity(5, 5)) == 0.0);
  CMatrix ones = CMatrix::Constant(2, 2, Complex(1, 0));
  REQUIRE(global_rejection_level(ones) == Approx(4.0));
  CMatrix bad = CMatrix::Identity(3, 3);
  bad.col(1).setZero();
  REQUIRE_THROWS_AS(global_rejection_level(bad), DegenerateGainError);
  REQUIRE_THROWS_AS(global_rejection_level(CMatrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("global rejection level vanishes exactly on generalized permutations") {
  std::mt19937 gen(57);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 7);
    const CMatrix g = random_generalized_permutation(gen, n, 0.5, 1.5);
    REQUIRE(global_rejection_level(g) == 0.0);
  }
}

TEST_CASE("a single off-pattern entry is detected") {
  std::mt19937 gen(58);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 7);
    CMatrix g = random_generalized_permutation(gen, n, 0.5, 1.5);
    // place a magnitude-0.1 entry somewhere off the permutation pattern
    while (true) {
      const int i = static_cast<int>(gen() % static_cast<unsigned>(n));
      const int j = static_cast<int>(gen() % static_cast<unsigned>(n));
      if (g(i, j) == Complex(0, 0)) {
        g(i, j) = Complex(0.1, 0.0);
        break;
      }
    }
    REQUIRE(global_rejection_level(g) > 0.005);
  }
}

TEST_CASE("global rejection level is scale invariant") {
  std::mt19937 gen(59);
  const CMatrix g = random_complex(gen, 5, 5);
  const double base = global_rejection_level(g);
  for (const Complex c : {Complex(3.0, 0.0), Complex(0.0, -2.0), Complex(1e-3, 1e-3)}) {
    REQUIRE(global_rejection_level(c * g) == Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("off-diagonality closed forms and oracle") {
  std::mt19937 gen(60);
  SECTION("diagonal targets under the identity transform") {
    TargetSet ts;
    ts.n_sources = 3;
    for (int k = 0; k < 4; ++k)
      ts.matrices.push_back(CMatrix(random_cvector(gen, 3).asDiagonal()));
    REQUIRE(off_diagonality(CMatrix::Identity(3, 3), ts) == 0.0);
  }
  SECTION("an all-ones 2x2 matrix has two off-diagonal units") {
    TargetSet ts;
    ts.n_sources = 2;
    ts.matrices.push_back(CMatrix::Constant(2, 2, Complex(1, 0)));
    ts.matrices.push_back(CMatrix::Zero(2, 2));
    REQUIRE(off_diagonality(CMatrix::Identity(2, 2), ts) == Approx(2.0));
  }
  SECTION("random instance matches a double loop") {
    TargetSet ts = random_targets(gen, 4, 3, 3);
    const CMatrix v = random_complex(gen, 3, 4);
    double expected = 0.0;
    for (const auto& r : ts.matrices) {
      const CMatrix t = v * r * v.adjoint();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          if (i != j) expected += std::norm(t(i, j));
    }
    REQUIRE(off_diagonality(v, ts) == Approx(expected).epsilon(1e-12));
  }
}
