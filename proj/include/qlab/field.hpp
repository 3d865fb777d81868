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

#ifndef QLAB_FIELD_HPP
#define QLAB_FIELD_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace qlab::field {

// Periodic 1D lattice of `sites` points with spacing `spacing`.
struct LatticeSpec {
  std::size_t sites = 2;
  double spacing = 1.0;

  LatticeSpec() = default;
  LatticeSpec(std::size_t sites, double spacing);

  double length() const { return static_cast<double>(sites) * spacing; }
  bool operator==(const LatticeSpec&) const = default;
};

// Classical state S: phi_j(x), pi_j(x) with components along rows and sites
// along columns.
//
// `twist` holds, per component, the offset phi(x + L a) - phi(x). It is zero
// for ordinary periodic fields; sine-Gordon kinks carry one period of the
// potential so that the wrap-around link sees no jump.
struct FieldState {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd pi;
  Eigen::VectorXd twist;

  FieldState() = default;
  FieldState(std::size_t components, std::size_t sites);

  std::size_t components() const { return static_cast<std::size_t>(phi.rows()); }
  std::size_t sites() const { return static_cast<std::size_t>(phi.cols()); }

  bool all_finite() const;
  bool has_twist() const;
};

enum class Potential { free, phi4, sine_gordon };

std::string to_string(Potential p);
Potential potential_from_string(const std::string& name);

// Energy density per component:
//   free:        pi^2/2 + (grad phi)^2/2 + m^2 phi^2/2
//   phi4:        free + lambda phi^4
//   sine_gordon: pi^2/2 + (grad phi)^2/2 + (m^4/lambda)(1 - cos(sqrt(lambda) phi / m))
// The sine-Gordon potential already contains the m^2 phi^2/2 term at small
// amplitude, so no separate mass term is added.
struct FieldModel {
  LatticeSpec lattice;
  std::vector<double> masses;
  Potential potential = Potential::free;
  double coupling = 0.0;

  FieldModel() = default;
  FieldModel(LatticeSpec lattice, std::vector<double> masses, Potential potential,
             double coupling = 0.0);

  std::size_t components() const { return masses.size(); }

  // V(phi) for component j, excluding the m^2 phi^2/2 term for free/phi4.
  double potential_value(std::size_t j, double phi) const;
  double potential_derivative(std::size_t j, double phi) const;
  // One period of the sine-Gordon potential in phi: 2 pi m / sqrt(lambda).
  double sine_gordon_period(std::size_t j) const;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// E = a * sum_x sum_j [ pi^2/2 + (forward difference of phi)^2/2 + ... ].
double classical_energy(const FieldState& state, const FieldModel& model);

// -(1/a) dE/dphi_j(x): the right-hand side of d(pi)/dt.
Eigen::MatrixXd field_force(const FieldState& state, const FieldModel& model);

// One kick-drift-kick step. `source` (same shape as phi, or empty) is added
// to the force in both half kicks.
FieldState leapfrog_step(const FieldState& state, const FieldModel& model, double dt,
                         const Eigen::MatrixXd* source = nullptr, std::size_t step_index = 0);

// Deterministic integration: returns states after every step, initial
// included (steps + 1 entries).
std::vector<FieldState> integrate(const FieldState& state, const FieldModel& model, double dt,
                                  std::size_t steps);

// Initial configurations.
struct Vacuum {};
struct Kink {
  double center = 0.0;  // kink position in length units, relative to lattice middle
};
struct PlaneWave {
  int wave_number = 1;  // k = 2 pi n / (L a)
  double amplitude = 1.0;
};
struct GaussianRandom {
  double sigma = 1.0;
  std::uint64_t seed = 0;
};
using InitialKind = std::variant<Vacuum, Kink, PlaneWave, GaussianRandom>;

// Lattice site positions are x_i = (i - (L - 1)/2) a, symmetric about zero.
double site_position(const LatticeSpec& lattice, std::size_t i);

FieldState make_initial_state(const InitialKind& kind, const FieldModel& model);

// Analytic continuum sine-Gordon kink mass 8 m^3 / lambda.
double kink_mass(double mass, double coupling);

// Lattice dispersion of the forward-difference Laplacian:
// w^2 = m^2 + (4/a^2) sin^2(p a / 2).
double lattice_frequency(double mass, double momentum, double spacing);

}  // namespace qlab::field

#endif  // QLAB_FIELD_HPP
