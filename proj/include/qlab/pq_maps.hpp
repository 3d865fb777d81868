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

// Maps between classical lattice field states and states of the truncated
// Fock space.
//
// A field state S is transformed mode by mode:
//
//   theta_j(p) = sqrt(w_j(p)) * a * sum_y exp(-i p y) phi_j(y) / sqrt(L a)
//   tau_j(p)   = (1/sqrt(w_j(p))) * a * sum_y exp(-i p y) pi_j(y) / sqrt(L a)
//   alpha_j(p) = (theta_j(p) + i tau_j(p)) / sqrt(2)
//
// and v(S) is the multimode coherent state with amplitudes alpha on the
// selected modes. With this scaling and the lattice dispersion,
// <v(S)| H_n |v(S)> equals the classical lattice energy of S.

#ifndef QLAB_PQ_MAPS_HPP
#define QLAB_PQ_MAPS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "qlab/field.hpp"
#include "qlab/fock.hpp"
#include "qlab/mode_basis.hpp"
#include "qlab/report.hpp"

namespace qlab::pq {

using fock::Complex;
using field::FieldState;

/// The constant c in v(S) = exp(c sum (theta + i tau) a^H)|0>.
inline const double kCoherentScale = 1.0 / std::sqrt(2.0);

/// Largest tail mass coherent_vector accepts without a warning.
inline constexpr double kTailWarnThreshold = 1e-8;

// theta, tau for every (component, momentum index); rows are components.
struct ModeAmplitudes {
  Eigen::MatrixXcd theta;
  Eigen::MatrixXcd tau;

  Complex alpha(std::size_t component, std::size_t k) const;
  Eigen::MatrixXcd alpha() const;
};

ModeAmplitudes field_to_amplitudes(const FieldState& state, const ModeBasis& basis);

// Inverse transform. Rejects amplitudes whose theta(-p) = conj(theta(p))
// (or tau) symmetry is violated by more than 1e-8, then symmetrizes.
FieldState amplitudes_to_field(const ModeAmplitudes& amps, const ModeBasis& basis);

// theta, tau of the real field whose coherent amplitudes are `alpha`
// (components x sites).
ModeAmplitudes amplitudes_from_alpha(const Eigen::MatrixXcd& alpha, const ModeBasis& basis);

// Amplitudes on the selected modes, in Fock-mode order.
Eigen::VectorXcd selected_alpha(const ModeAmplitudes& amps, const ModeBasis& basis);
Eigen::VectorXcd selected_alpha(const FieldState& state, const ModeBasis& basis);

// Field with the given selected amplitudes and zero amplitude elsewhere.
FieldState field_from_selected_alpha(const Eigen::VectorXcd& alpha, const ModeBasis& basis);

// Orthogonal projection onto the span of the selected modes.
FieldState project_onto_modes(const FieldState& state, const ModeBasis& basis);

struct CoherentVector {
  fock::Vector entries;
  Eigen::VectorXcd alpha;
  // Probability mass of the untruncated state beyond n_max.
  double tail_mass = 0.0;
};

// Poisson(mean) mass above n_max.
double poisson_tail(double mean, std::size_t n_max);

// Normalized truncated multimode coherent state |alpha>.
CoherentVector coherent_state(const Eigen::VectorXcd& alpha, const fock::FockSpec& fock);

// v(S). Warns (and proceeds) when the tail mass exceeds kTailWarnThreshold.
CoherentVector coherent_vector(const FieldState& state, const ModeBasis& basis,
                               const fock::FockSpec& fock);

// <v(S)| rho |v(S)>; unnormalized, so the density over the alpha plane is
// this value divided by pi^M.
double q_probability(const fock::DensityMatrix& rho, const FieldState& state, const ModeBasis& basis,
                     const fock::FockSpec& fock);
// Same for rho = |psi><psi|.
double q_probability(const fock::Vector& psi, const FieldState& state, const ModeBasis& basis,
                     const fock::FockSpec& fock);

struct WeightedState {
  FieldState state;
  double weight;
};

// Complex Gaussian around a base state: on each selected mode i,
// Re alpha and Im alpha get independent N(0, widths[i]^2) offsets.
struct GaussianSampler {
  FieldState base;
  Eigen::VectorXd widths;
  std::uint64_t seed = 0;
};

// Pr(S) as a finite weighted list or a sampler.
class ClassicalEnsemble {
 public:
  static ClassicalEnsemble point(FieldState state);
  // Weights must be >= 0 with positive sum; they are normalized.
  static ClassicalEnsemble weighted(std::vector<WeightedState> members);
  static ClassicalEnsemble sampler(GaussianSampler sampler);

  bool is_finite() const { return std::holds_alternative<std::vector<WeightedState>>(content_); }
  const std::vector<WeightedState>& members() const;
  const GaussianSampler& gaussian() const;

  // Draws `count` states (sampler ensembles only).
  std::vector<FieldState> draw(const ModeBasis& basis, std::size_t count) const;

 private:
  explicit ClassicalEnsemble(std::variant<std::vector<WeightedState>, GaussianSampler> c)
      : content_(std::move(c)) {}
  std::variant<std::vector<WeightedState>, GaussianSampler> content_;
};

struct PReconstruction {
  fock::DensityMatrix rho;
  // Monte Carlo standard error of rho in Frobenius norm; zero for finite
  // ensembles, which are summed exactly.
  double standard_error;
  std::size_t draws;
  double max_tail_mass;
};

// rho = sum over S of Pr(S) |v(S)><v(S)| with normalized v(S).
PReconstruction p_reconstruct(const ClassicalEnsemble& ensemble, const ModeBasis& basis,
                              const fock::FockSpec& fock, std::size_t samples);

struct EnergyEquivalenceReport {
  double lhs = 0.0;  // Tr(rho H_n)
  double rhs = 0.0;  // <H(S)>
  double abs_err = 0.0;
  double rel_err = 0.0;
  double max_tail_mass = 0.0;
  double projection_residual = 0.0;
  std::size_t members = 0;

  Records records() const;
};

// Members of a finite ensemble are first projected onto the selected modes;
// the projection residual is reported. Sampler ensembles use `samples`
// draws, with both sides averaged over the same draws.
EnergyEquivalenceReport check_energy_equivalence(const ClassicalEnsemble& ensemble,
                                                 const field::FieldModel& model, const ModeBasis& basis,
                                                 const fock::FockSpec& fock, std::size_t samples = 0);
EnergyEquivalenceReport check_energy_equivalence(const ClassicalEnsemble& ensemble,
                                                 const field::FieldModel& model, const ModeBasis& basis,
                                                 const fock::FockSpec& fock,
                                                 const fock::OperatorMatrix& hn, std::size_t samples = 0);

// exp(-(1/2) sum_{p} (|theta(p) - theta0(p)|^2 + |tau(p) - tau0(p)|^2)), the
// sum running over the whole Brillouin zone. Each conjugate pair (p, -p) is
// one independent complex mode, so this is unit variance per mode.
double gaussian_q_prediction(const FieldState& state, const FieldState& base, const ModeBasis& basis);

struct QGaussianReport {
  double max_rel_dev = 0.0;
  double max_tail_mass = 0.0;
  double min_q = 1.0;
  std::size_t probes = 0;

  Records records() const;
};

// rho = |v(S0)><v(S0)| evaluated at `probes` random states around S0 (the
// first probe is S0 itself); compares q_probability with
// gaussian_q_prediction. Probe offsets are N(0, probe_width^2) on Re and Im
// of each selected amplitude.
QGaussianReport q_gaussian_check(const FieldState& base, const ModeBasis& basis, const fock::FockSpec& fock,
                                 std::size_t probes, std::uint64_t seed, double probe_width = 0.5);

}  // namespace qlab::pq

#endif  // QLAB_PQ_MAPS_HPP
