// Copyright 2026 The qlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <cmath>

#include "doctest.h"
#include "qlab/fock.hpp"
#include "support.hpp"

using namespace qlab::fock;

TEST_CASE("flat index puts mode 0 in the fastest digit") {
  const FockSpec spec(3, 2);
  CHECK(spec.dim() == 27);
  CHECK(spec.stride(0) == 1);
  CHECK(spec.stride(2) == 9);
  const std::array<std::size_t, 3> occ{2, 0, 1};
  CHECK(spec.index(occ) == 2 + 9);
  for (std::size_t i = 0; i < spec.dim(); ++i) CHECK(spec.index(spec.occupations(i)) == i);
}

TEST_CASE("oversized Fock spaces are rejected") {
  CHECK_THROWS(FockSpec(0, 3));
  CHECK_THROWS(FockSpec(30, 10));
}

TEST_CASE("ladder matrices match the dense construction") {
  const FockSpec spec(1, 6);
  const Matrix expected = qlab::testing::dense_annihilation(7);
  CHECK((build_annihilation(spec, 0).dense() - expected).norm() == doctest::Approx(0.0));
  CHECK((build_creation(spec, 0).dense() - expected.adjoint()).norm() == doctest::Approx(0.0));
  const Matrix n = build_number(spec, 0).dense();
  for (int k = 0; k < 7; ++k) CHECK(n(k, k).real() == doctest::Approx(k));
}

TEST_CASE("truncated commutator is the identity except at the top level") {
  const FockSpec spec(2, 4);
  const auto a = build_annihilation(spec, 1);
  const auto ad = build_creation(spec, 1);
  const Matrix c = (a * ad - ad * a).dense();
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    const double expected = spec.occupations(i)[1] == 4 ? -4.0 : 1.0;
    CHECK(c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() == doctest::Approx(expected));
  }
}

TEST_CASE("operators on different modes commute") {
  const FockSpec spec(2, 3);
  const auto a0 = build_annihilation(spec, 0);
  const auto a1d = build_creation(spec, 1);
  CHECK((a0 * a1d - a1d * a0).dense().norm() == doctest::Approx(0.0));
}

TEST_CASE("hermitian tag is verified") {
  const FockSpec spec(1, 3);
  CHECK_THROWS_AS(OperatorMatrix(build_annihilation(spec, 0).entries(), true), std::invalid_argument);
  CHECK(build_number(spec, 0).hermitian());
  CHECK(build_number(spec, 0).hermiticity_defect() == 0.0);
}

TEST_CASE("density matrices are validated") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  CHECK_NOTHROW(DensityMatrix{m});

  Matrix bad_trace = m * 2.0;
  CHECK_THROWS_AS(DensityMatrix{bad_trace}, std::invalid_argument);

  Matrix not_hermitian = m;
  not_hermitian(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{not_hermitian}, std::invalid_argument);

  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{negative}, std::invalid_argument);
}

TEST_CASE("expectations of basis states") {
  const FockSpec spec(2, 5);
  const std::array<std::size_t, 2> occ{3, 1};
  const Vector psi = basis_state(spec, occ);
  CHECK(expectation(psi, build_number(spec, 0)).real() == doctest::Approx(3.0));
  CHECK(expectation(DensityMatrix::pure(psi), build_number(spec, 1)).real() == doctest::Approx(1.0));
}

TEST_CASE("ground state of a shifted number operator") {
  const FockSpec spec(2, 4);
  const auto h = (build_number(spec, 0) + build_number(spec, 1)).shifted(-0.25);
  const GroundState g = ground_state(h);
  CHECK(g.energy == doctest::Approx(-0.25));
  CHECK(g.residual < 1e-10);
  CHECK(std::norm(g.vector(0)) == doctest::Approx(1.0));
  const Eigen::VectorXd s = spectrum(h);
  CHECK(s(s.size() - 1) == doctest::Approx(7.75));
}

TEST_CASE("ground_state refuses non-Hermitian or oversized operators") {
  CHECK_THROWS_AS(ground_state(build_annihilation(FockSpec(1, 3), 0)), std::invalid_argument);
  CHECK_THROWS_AS(ground_state(identity(FockSpec(1, 5000))), std::invalid_argument);
}

TEST_CASE("trace distance of orthogonal pure states is one") {
  const FockSpec spec(1, 2);
  const std::array<std::size_t, 1> zero{0}, one{1};
  const Matrix a = DensityMatrix::pure(basis_state(spec, zero)).entries();
  const Matrix b = DensityMatrix::pure(basis_state(spec, one)).entries();
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
}
