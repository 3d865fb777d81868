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
#include "qlab/ladder.hpp"
#include "qlab/reachability.hpp"
#include "support.hpp"

using namespace qlab::pq;
using qlab::fock::Complex;
using qlab::fock::FockSpec;
using qlab::fock::LadderPolynomial;
using qlab::fock::Matrix;

namespace {

qlab::fock::OperatorMatrix quartic(std::size_t n_max, double g) {
  LadderPolynomial h = LadderPolynomial::number(0);
  if (g != 0.0) {
    h += Complex(g) * LadderPolynomial::quadrature_q(0).pow(4).ordered(qlab::fock::Ordering::normal);
  }
  return qlab::fock::compress(FockSpec(1, n_max), h, true);
}

// Ground energy of a^H a + g :q^4: from dense matrices, q = (a + a^H)/sqrt(2).
double dense_ground_energy(int levels, double g) {
  const Matrix a = qlab::testing::dense_annihilation(levels);
  const Matrix ad = a.adjoint();
  const int binom[5] = {1, 4, 6, 4, 1};
  Matrix h = ad * a;
  for (int k = 0; k <= 4; ++k) {
    Matrix term = Matrix::Identity(levels, levels);
    for (int i = 0; i < k; ++i) term = term * ad;
    for (int i = 0; i < 4 - k; ++i) term = term * a;
    h += (g * binom[k] / 4.0) * term;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  return eig.eigenvalues()(0);
}

}  // namespace

TEST_CASE("coherent energy of the quartic oscillator") {
  const FockSpec fock(1, 40);
  const auto h = quartic(40, 0.1);
  Eigen::VectorXcd alpha(1);
  alpha << Complex(0.7, -0.4);
  const double q = std::sqrt(2.0) * 0.7;
  CHECK(coherent_energy(h, fock, alpha) == doctest::Approx(0.65 + 0.1 * std::pow(q, 4)).epsilon(1e-12));
}

TEST_CASE("free oscillator has no reachability gap") {
  const auto r = reachability_gap(quartic(20, 0.0), FockSpec(1, 20), {});
  CHECK(std::abs(r.e_quantum) < 1e-12);
  CHECK(std::abs(r.gap) < 1e-9);
  CHECK(r.converged);
}

TEST_CASE("quartic oscillator ground state lies below every coherent state") {
  // Frozen from the dense oracle at 61 levels.
  const double frozen = -0.0028958056526810815;
  CHECK(dense_ground_energy(61, 0.1) == doctest::Approx(frozen).epsilon(1e-10));

  ReachabilityOptions opt;
  opt.seed = 7;
  const auto r = reachability_gap(quartic(40, 0.1), FockSpec(1, 40), opt);
  CHECK(r.e_quantum == doctest::Approx(frozen).epsilon(1e-10));
  CHECK(std::abs(r.e_coherent_min) < 1e-9);
  CHECK(r.gap > 0.0);
  CHECK(r.gap == doctest::Approx(-frozen).epsilon(1e-6));
  CHECK(r.converged);
  CHECK(r.restarts == opt.restarts);
}

TEST_CASE("reachability rejects mismatched inputs") {
  CHECK_THROWS(reachability_gap(quartic(10, 0.1), FockSpec(1, 12), {}));
  ReachabilityOptions bad;
  bad.restarts = 0;
  CHECK_THROWS(reachability_gap(quartic(10, 0.1), FockSpec(1, 10), bad));
}
