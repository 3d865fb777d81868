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
#include <numbers>

#include "doctest.h"
#include "qlab/field.hpp"

using namespace qlab::field;

TEST_CASE("lattice and model validation") {
  CHECK_THROWS(LatticeSpec(1, 1.0));
  CHECK_THROWS(LatticeSpec(4, 0.0));
  const LatticeSpec lat(4, 0.5);
  CHECK(lat.length() == 2.0);
  CHECK_THROWS(FieldModel(lat, {}, Potential::free));
  CHECK_THROWS(FieldModel(lat, {-1.0}, Potential::free));
  CHECK_THROWS(FieldModel(lat, {1.0}, Potential::sine_gordon, 0.0));
  CHECK_THROWS(FieldModel(lat, {0.0}, Potential::sine_gordon, 1.0));
  CHECK(potential_from_string(to_string(Potential::phi4)) == Potential::phi4);
  CHECK_THROWS(potential_from_string("cubic"));
}

TEST_CASE("site positions are symmetric about zero") {
  const LatticeSpec lat(5, 0.5);
  CHECK(site_position(lat, 0) == doctest::Approx(-1.0));
  CHECK(site_position(lat, 2) == doctest::Approx(0.0));
  CHECK(site_position(lat, 4) == doctest::Approx(1.0));
}

TEST_CASE("energy of simple configurations") {
  const LatticeSpec lat(8, 0.5);
  const FieldModel model(lat, {2.0, 1.0}, Potential::phi4, 0.3);
  FieldState s(2, 8);
  CHECK(classical_energy(s, model) == 0.0);
  // Constant phi: only mass and quartic terms, a * L * (m^2 c^2 / 2 + lambda c^4).
  s.phi.row(0).setConstant(0.7);
  const double expected = 0.5 * 8 * (0.5 * 4.0 * 0.49 + 0.3 * std::pow(0.7, 4));
  CHECK(classical_energy(s, model) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("plane wave oscillates at the lattice frequency") {
  const LatticeSpec lat(16, 0.5);
  const FieldModel model(lat, {1.0}, Potential::free);
  const FieldState s0 = make_initial_state(PlaneWave{2, 0.1}, model);
  const double k = 2.0 * std::numbers::pi * 2 / lat.length();
  const double w = lattice_frequency(1.0, k, lat.spacing);
  const double dt = 1e-3;
  const std::size_t steps = 2000;
  const auto traj = integrate(s0, model, dt, steps);
  const double t = dt * steps;
  for (Eigen::Index x = 0; x < 16; ++x) {
    CHECK(traj.back().phi(0, x) == doctest::Approx(s0.phi(0, x) * std::cos(w * t)).epsilon(1e-5).scale(0.1));
  }
  CHECK(lattice_frequency(1.3, 0.0, 0.5) == doctest::Approx(1.3));
}

TEST_CASE("leapfrog conserves phi^4 energy to second order") {
  const LatticeSpec lat(32, 0.25);
  const FieldModel model(lat, {1.0}, Potential::phi4, 0.5);
  const FieldState s0 = make_initial_state(GaussianRandom{0.5, 7}, model);
  const double e0 = classical_energy(s0, model);
  double drift_coarse = 0.0, drift_fine = 0.0;
  for (const auto& s : integrate(s0, model, 0.02, 500)) {
    drift_coarse = std::max(drift_coarse, std::abs(classical_energy(s, model) - e0));
  }
  for (const auto& s : integrate(s0, model, 0.01, 1000)) {
    drift_fine = std::max(drift_fine, std::abs(classical_energy(s, model) - e0));
  }
  CHECK(drift_coarse / e0 < 1e-2);
  // Halving dt cuts the bounded energy error about fourfold.
  CHECK(drift_coarse / drift_fine == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("momentum flip retraces the trajectory") {
  const LatticeSpec lat(16, 0.5);
  const FieldModel model(lat, {1.0, 0.5}, Potential::phi4, 0.2);
  const FieldState s0 = make_initial_state(GaussianRandom{0.8, 3}, model);
  FieldState s = integrate(s0, model, 0.05, 300).back();
  s.pi = -s.pi;
  FieldState back = integrate(s, model, 0.05, 300).back();
  back.pi = -back.pi;
  CHECK((back.phi - s0.phi).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((back.pi - s0.pi).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("sine-Gordon kink") {
  CHECK(kink_mass(1.0, 1.0) == 8.0);
  CHECK(kink_mass(2.0, 0.5) == doctest::Approx(128.0));

  const LatticeSpec lat(400, 0.1);
  const FieldModel model(lat, {1.0}, Potential::sine_gordon, 2.0);
  const FieldState kink = make_initial_state(Kink{0.0}, model);
  CHECK(kink.has_twist());
  CHECK(kink.twist(0) == doctest::Approx(model.sine_gordon_period(0)));
  // Profile runs from 0 to one period across the lattice.
  CHECK(kink.phi(0, 0) == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
  CHECK(kink.phi(0, 399) == doctest::Approx(model.sine_gordon_period(0)).epsilon(1e-6));
  const double e = classical_energy(kink, model);
  CHECK(e == doctest::Approx(kink_mass(1.0, 2.0)).epsilon(1e-3));

  // A static solution barely moves.
  const FieldState later = integrate(kink, model, 0.01, 200).back();
  CHECK((later.phi - kink.phi).cwiseAbs().maxCoeff() < 1e-3);
  CHECK(classical_energy(later, model) == doctest::Approx(e).epsilon(1e-6));

  const FieldModel free_model(lat, {1.0}, Potential::free);
  CHECK_THROWS(make_initial_state(Kink{0.0}, free_model));
}

TEST_CASE("non-finite evolution raises BlowUpError with the step") {
  const LatticeSpec lat(4, 1.0);
  const FieldModel model(lat, {1.0}, Potential::phi4, 1.0);
  FieldState s(1, 4);
  s.phi.setConstant(1e120);
  try {
    (void)leapfrog_step(s, model, 0.1, nullptr, 17);
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.step() == 17);
  }
}

TEST_CASE("random initial states are reproducible from the seed") {
  const FieldModel model(LatticeSpec(8, 1.0), {1.0}, Potential::free);
  const FieldState a = make_initial_state(GaussianRandom{1.0, 11}, model);
  const FieldState b = make_initial_state(GaussianRandom{1.0, 11}, model);
  const FieldState c = make_initial_state(GaussianRandom{1.0, 12}, model);
  CHECK(a.phi == b.phi);
  CHECK(a.pi == b.pi);
  CHECK(a.phi != c.phi);
}
