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
#include <random>

#include "doctest.h"
#include "qlab/pq_maps.hpp"
#include "support.hpp"

using namespace qlab::pq;
using qlab::field::FieldModel;
using qlab::field::LatticeSpec;
using qlab::field::Potential;
using qlab::fock::FockSpec;

namespace {

FieldState random_state(std::size_t components, std::size_t sites, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  FieldState s(components, sites);
  for (Eigen::Index j = 0; j < s.phi.rows(); ++j) {
    for (Eigen::Index x = 0; x < s.phi.cols(); ++x) {
      s.phi(j, x) = normal(rng);
      s.pi(j, x) = normal(rng);
    }
  }
  return s;
}

std::vector<ModeIndex> every_mode(std::size_t components, std::size_t sites) {
  std::vector<ModeIndex> sel;
  for (std::size_t j = 0; j < components; ++j) {
    for (std::size_t k = 0; k < sites; ++k) sel.push_back({j, k});
  }
  return sel;
}

}  // namespace

TEST_CASE("field and mode amplitudes round trip") {
  for (std::size_t L : {5u, 8u}) {
    const LatticeSpec lat(L, 0.4);
    const ModeBasis basis(lat, {1.0, 2.5}, every_mode(2, L));
    const FieldState s = random_state(2, L, 3);
    const FieldState back = amplitudes_to_field(field_to_amplitudes(s, basis), basis);
    CHECK((back.phi - s.phi).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.pi - s.pi).cwiseAbs().maxCoeff() < 1e-12);
    // Selecting every mode makes the projection the identity.
    CHECK((project_onto_modes(s, basis).phi - s.phi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("amplitudes violating the reality condition are rejected") {
  const LatticeSpec lat(4, 1.0);
  const ModeBasis basis(lat, {1.0}, every_mode(1, 4));
  ModeAmplitudes amps = field_to_amplitudes(random_state(1, 4, 1), basis);
  amps.theta(0, 1) += 0.5;
  CHECK_THROWS_AS(amplitudes_to_field(amps, basis), std::invalid_argument);
}

TEST_CASE("mode energy equals the classical free energy") {
  // H = sum_k w_k |alpha_k|^2 for a free field.
  const LatticeSpec lat(6, 0.5);
  const FieldModel model(lat, {1.3}, Potential::free);
  const ModeBasis basis(lat, {1.3}, every_mode(1, 6));
  const FieldState s = random_state(1, 6, 9);
  const ModeAmplitudes amps = field_to_amplitudes(s, basis);
  double mode_energy = 0.0;
  for (std::size_t k = 0; k < 6; ++k) mode_energy += basis.frequency(0, k) * std::norm(amps.alpha(0, k));
  CHECK(mode_energy == doctest::Approx(qlab::field::classical_energy(s, model)).epsilon(1e-13));
}

TEST_CASE("poisson tail") {
  CHECK(poisson_tail(0.0, 3) == 0.0);
  CHECK(poisson_tail(1.0, 0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(poisson_tail(2.0, 2) == doctest::Approx(1.0 - std::exp(-2.0) * 5.0).epsilon(1e-14));
  CHECK(poisson_tail(1.0, 40) < 1e-45);
  CHECK_THROWS(poisson_tail(-1.0, 3));
}

TEST_CASE("coherent states are normalized with the right amplitudes") {
  const FockSpec fock(2, 12);
  Eigen::VectorXcd alpha(2);
  alpha << Complex(0.6, -0.2), Complex(-0.3, 0.5);
  const CoherentVector v = coherent_state(alpha, fock);
  CHECK(v.entries.norm() == doctest::Approx(1.0));
  const double kept = (1.0 - poisson_tail(0.4, 12)) * (1.0 - poisson_tail(0.34, 12));
  CHECK(v.tail_mass == doctest::Approx(1.0 - kept).epsilon(1e-6));
  // <1,2|alpha> = e^{-|a|^2/2} a0 * e^{-|b|^2/2} b^2/sqrt(2)
  const std::array<std::size_t, 2> occ{1, 2};
  const Complex expected = std::exp(-0.5 * (0.4 + 0.34)) * alpha(0) * alpha(1) * alpha(1) / std::sqrt(2.0);
  CHECK(std::abs(v.entries(static_cast<Eigen::Index>(fock.index(occ))) - expected) < 1e-12);
  CHECK_THROWS(coherent_state(Eigen::VectorXcd::Zero(3), fock));
}

TEST_CASE("large tails raise a warning") {
  const LatticeSpec lat(4, 1.0);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {1.0}, 1);
  qlab::testing::WarningCapture capture;
  Eigen::VectorXcd alpha(1);
  alpha << Complex(3.0, 0.0);
  (void)coherent_vector(field_from_selected_alpha(alpha, basis), basis, FockSpec(1, 4));
  CHECK(capture.messages.size() == 1);
}

TEST_CASE("Q of a coherent state is a Gaussian in the amplitudes") {
  const LatticeSpec lat(5, 0.7);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {1.0}, 3);
  const FockSpec fock(3, 14);
  Eigen::VectorXcd a0(3), a1(3);
  a0 << Complex(0.3, 0.1), Complex(-0.2, 0.4), Complex(0.1, -0.3);
  a1 << Complex(0.8, -0.2), Complex(0.1, 0.1), Complex(-0.5, 0.2);
  const FieldState s0 = field_from_selected_alpha(a0, basis);
  const FieldState s1 = field_from_selected_alpha(a1, basis);
  const qlab::fock::Vector psi = coherent_vector(s0, basis, fock).entries;
  const double q = q_probability(psi, s1, basis, fock);
  CHECK(q == doctest::Approx(std::exp(-(a1 - a0).squaredNorm())).epsilon(1e-9));
  CHECK(gaussian_q_prediction(s1, s0, basis) == doctest::Approx(std::exp(-(a1 - a0).squaredNorm())).epsilon(1e-12));
}

TEST_CASE("Q is a probability for arbitrary density matrices") {
  const LatticeSpec lat(4, 1.0);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {1.0}, 2);
  const FockSpec fock(2, 5);
  qlab::testing::WarningCapture quiet;  // small n_max, large tails
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    qlab::fock::Matrix g(static_cast<Eigen::Index>(fock.dim()), static_cast<Eigen::Index>(fock.dim()));
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = Complex(normal(rng), normal(rng));
    qlab::fock::Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    const qlab::fock::DensityMatrix dm(rho);
    Eigen::VectorXcd alpha(2);
    alpha << Complex(normal(rng), normal(rng)), Complex(normal(rng), normal(rng));
    alpha *= 0.5;
    const double q = q_probability(dm, field_from_selected_alpha(alpha, basis), basis, fock);
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
  }
}

TEST_CASE("twisted fields have no mode expansion") {
  const LatticeSpec lat(8, 0.5);
  const FieldModel model(lat, {1.0}, Potential::sine_gordon, 1.0);
  const FieldState kink = qlab::field::make_initial_state(qlab::field::Kink{0.0}, model);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {1.0}, 1);
  CHECK_THROWS_AS(field_to_amplitudes(kink, basis), std::invalid_argument);
}

TEST_CASE("finite ensembles are summed exactly") {
  const LatticeSpec lat(4, 1.0);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {1.0}, 1);
  const FockSpec fock(1, 20);
  Eigen::VectorXcd a(1), b(1);
  a << Complex(0.5, 0.0);
  b << Complex(0.0, -0.7);
  const auto ens = ClassicalEnsemble::weighted(
      {{field_from_selected_alpha(a, basis), 3.0}, {field_from_selected_alpha(b, basis), 1.0}});
  const PReconstruction p = p_reconstruct(ens, basis, fock, 1);
  CHECK(p.standard_error == 0.0);
  CHECK(p.draws == 2);
  const qlab::fock::Vector va = coherent_state(a, fock).entries;
  const qlab::fock::Vector vb = coherent_state(b, fock).entries;
  const qlab::fock::Matrix expected = 0.75 * va * va.adjoint() + 0.25 * vb * vb.adjoint();
  CHECK((p.rho.entries() - expected).norm() < 1e-12);

  CHECK_THROWS(ClassicalEnsemble::weighted({}));
  CHECK_THROWS(ClassicalEnsemble::weighted({{field_from_selected_alpha(a, basis), -1.0}}));
  CHECK_THROWS(ClassicalEnsemble::weighted({{field_from_selected_alpha(a, basis), 0.0}}));
}

TEST_CASE("a Gaussian ensemble about zero reconstructs a thermal state") {
  const LatticeSpec lat(4, 1.0);
  const ModeBasis basis = ModeBasis::lowest_modes(lat, {1.0}, 1);
  const FockSpec fock(1, 25);
  const double nbar = 0.5;
  qlab::testing::WarningCapture quiet;  // rare far draws exceed the tail threshold
  GaussianSampler g{FieldState(1, 4), Eigen::VectorXd::Constant(1, std::sqrt(nbar / 2.0)), 5};
  const PReconstruction p = p_reconstruct(ClassicalEnsemble::sampler(g), basis, fock, 40000);
  // Thermal occupation p_n = nbar^n / (1 + nbar)^(n + 1).
  qlab::fock::Matrix thermal = qlab::fock::Matrix::Zero(26, 26);
  for (int n = 0; n <= 25; ++n) thermal(n, n) = std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1);
  const double err = (p.rho.entries() - thermal).norm();
  CHECK(err < 4.0 * p.standard_error);
  CHECK(p.standard_error < 0.01);
}

TEST_CASE("energy equivalence for single coherent states") {
  const LatticeSpec lat(6, 0.5);
  Eigen::VectorXcd alpha(2);
  alpha << Complex(0.4, -0.3), Complex(0.2, 0.25);
  for (Potential pot : {Potential::free, Potential::phi4, Potential::sine_gordon}) {
    CAPTURE(qlab::field::to_string(pot));
    const FieldModel model(lat, {1.0}, pot, pot == Potential::free ? 0.0 : 0.3);
    const ModeBasis basis = ModeBasis::lowest_modes(lat, {1.0}, 2);
    const FockSpec fock(2, 14);
    const auto r = check_energy_equivalence(ClassicalEnsemble::point(field_from_selected_alpha(alpha, basis)),
                                            model, basis, fock);
    CHECK(r.rel_err < 1e-9);
    CHECK(r.projection_residual < 1e-12);
  }
}
