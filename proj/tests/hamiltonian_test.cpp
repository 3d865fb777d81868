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


#include <cmath>

#include "doctest.h"
#include "qlab/hamiltonian.hpp"
#include "qlab/pq_maps.hpp"
#include "support.hpp"

using namespace qlab::pq;
using qlab::field::FieldModel;
using qlab::field::LatticeSpec;
using qlab::field::Potential;
using qlab::fock::FockSpec;
using qlab::fock::Matrix;
using qlab::fock::Ordering;

TEST_CASE("free normal-ordered Hamiltonian is sum of w n") {
  const LatticeSpec lat(5, 0.6);
  const FieldModel model(lat, {0.8}, Potential::free);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {0.8}, 3);
  const FockSpec fock(3, 3);
  const Matrix h = normal_ordered_hamiltonian(fock, model, basis).dense();
  Matrix expected = Matrix::Zero(h.rows(), h.cols());
  double wsum = 0.0;
  for (std::size_t m = 0; m < 3; ++m) wsum += basis.selected_frequency(m);
  for (std::size_t i = 0; i < fock.dim(); ++i) {
    double e = 0.0;
    const auto occ = fock.occupations(i);
    for (std::size_t m = 0; m < 3; ++m) e += basis.selected_frequency(m) * static_cast<double>(occ[m]);
    expected(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = e;
  }
  CHECK((h - expected).norm() < 1e-12);
  // a a^H = a^H a + 1 on every mode.
  const Matrix han = anti_normal_ordered_hamiltonian(fock, model, basis).dense();
  CHECK((han - h - wsum * Matrix::Identity(h.rows(), h.cols())).norm() < 1e-12);
}

TEST_CASE("phi^4 zero mode matches a dense oracle") {
  // One selected mode (p = 0): phi(x) = (a + a^H) / sqrt(2 L a m), constant in x.
  const std::size_t L = 4;
  const double a = 0.5, m = 1.2, lambda = 0.3;
  const LatticeSpec lat(L, a);
  const FieldModel model(lat, {m}, Potential::phi4, lambda);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {m}, 1);
  const int levels = 10;
  const FockSpec fock(1, levels - 1);

  const Matrix an = qlab::testing::dense_annihilation(levels);
  const Matrix ad = an.adjoint();
  const double c = 1.0 / std::sqrt(2.0 * L * a * m);
  // :(a + a^H)^4: = sum_k C(4,k) a^H^k a^(4-k)
  const int binom[5] = {1, 4, 6, 4, 1};
  Matrix quartic = Matrix::Zero(levels, levels);
  for (int k = 0; k <= 4; ++k) {
    Matrix term = Matrix::Identity(levels, levels);
    for (int i = 0; i < k; ++i) term = term * ad;
    for (int i = 0; i < 4 - k; ++i) term = term * an;
    quartic += binom[k] * term;
  }
  const Matrix oracle = m * ad * an + (a * L * lambda * std::pow(c, 4)) * quartic;
  CHECK((normal_ordered_hamiltonian(fock, model, basis).dense() - oracle).norm() < 1e-12);
}

TEST_CASE("ordering and dimension guards") {
  const LatticeSpec lat(4, 1.0);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {1.0}, 1);
  const FieldModel sg(lat, {1.0}, Potential::sine_gordon, 0.5);
  CHECK_NOTHROW(normal_ordered_hamiltonian(FockSpec(1, 6), sg, basis));
  CHECK_THROWS_AS(anti_normal_ordered_hamiltonian(FockSpec(1, 6), sg, basis), std::invalid_argument);

  const FieldModel phi4(lat, {1.0}, Potential::phi4, 0.5);
  {
    qlab::testing::WarningCapture capture;
    (void)normal_ordered_hamiltonian(FockSpec(1, 3), phi4, basis);
    CHECK(capture.messages.size() == 1);
  }
  {
    qlab::testing::WarningCapture capture;
    (void)normal_ordered_hamiltonian(FockSpec(1, 4), phi4, basis);
    CHECK(capture.messages.empty());
  }
  CHECK_THROWS(normal_ordered_hamiltonian(FockSpec(2, 4), phi4, basis));
  const FieldModel other(lat, {2.0}, Potential::phi4, 0.5);
  CHECK_THROWS(normal_ordered_hamiltonian(FockSpec(1, 4), other, basis));
}

TEST_CASE("normal-ordered expectation in a coherent state is the classical energy") {
  const LatticeSpec lat(6, 0.5);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {0.9, 1.4}, 2);
  const FockSpec fock(2, 16);
  Eigen::VectorXcd alpha(2);
  alpha << Complex(0.5, 0.2), Complex(-0.3, 0.4);
  const FieldState s = field_from_selected_alpha(alpha, basis);
  const qlab::fock::Vector v = coherent_state(alpha, fock).entries;
  for (Potential pot : {Potential::phi4, Potential::sine_gordon}) {
    const FieldModel model(lat, {0.9, 1.4}, pot, 0.4);
    const double lhs = qlab::fock::expectation(v, normal_ordered_hamiltonian(fock, model, basis)).real();
    CHECK(lhs == doctest::Approx(qlab::field::classical_energy(s, model)).epsilon(1e-10));
  }
}
