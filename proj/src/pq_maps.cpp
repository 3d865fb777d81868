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

#include "qlab/pq_maps.hpp"

#include <algorithm>
#include <numbers>
#include <random>
#include <sstream>

#include "qlab/hamiltonian.hpp"
#include "qlab/warnings.hpp"

namespace qlab::pq {

namespace {

constexpr double kRealityTolerance = 1e-8;
const Complex kI(0.0, 1.0);

// exp(2 pi i n / L) for n = 0..L-1; phases are looked up by (k x) mod L.
std::vector<Complex> unit_roots(std::size_t L) {
  std::vector<Complex> roots(L);
  for (std::size_t n = 0; n < L; ++n) {
    roots[n] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(L));
  }
  return roots;
}

void check_lattice(const FieldState& state, const ModeBasis& basis, const char* who) {
  if (state.components() != basis.components() || state.sites() != basis.sites()) {
    throw std::invalid_argument(std::string(who) + ": field state does not match the mode basis lattice");
  }
  if (state.has_twist()) {
    throw std::invalid_argument(std::string(who) + ": twisted boundary fields have no periodic mode expansion");
  }
}

}  // namespace

Complex ModeAmplitudes::alpha(std::size_t component, std::size_t k) const {
  const auto j = static_cast<Eigen::Index>(component);
  const auto kk = static_cast<Eigen::Index>(k);
  return kCoherentScale * (theta(j, kk) + kI * tau(j, kk));
}

Eigen::MatrixXcd ModeAmplitudes::alpha() const { return kCoherentScale * (theta + kI * tau); }

ModeAmplitudes field_to_amplitudes(const FieldState& state, const ModeBasis& basis) {
  check_lattice(state, basis, "field_to_amplitudes");
  const std::size_t L = basis.sites();
  const std::size_t N = basis.components();
  const auto roots = unit_roots(L);
  const double norm = std::sqrt(basis.lattice().spacing / static_cast<double>(L));
  ModeAmplitudes amps;
  amps.theta.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(L));
  amps.tau.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(L));
  for (std::size_t j = 0; j < N; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    for (std::size_t k = 0; k < L; ++k) {
      Complex sphi = 0.0;
      Complex spi = 0.0;
      for (std::size_t x = 0; x < L; ++x) {
        const Complex phase = std::conj(roots[(k * x) % L]);
        sphi += phase * state.phi(jj, static_cast<Eigen::Index>(x));
        spi += phase * state.pi(jj, static_cast<Eigen::Index>(x));
      }
      const double w = basis.frequency(j, k);
      amps.theta(jj, static_cast<Eigen::Index>(k)) = std::sqrt(w) * norm * sphi;
      amps.tau(jj, static_cast<Eigen::Index>(k)) = norm * spi / std::sqrt(w);
    }
  }
  return amps;
}

FieldState amplitudes_to_field(const ModeAmplitudes& amps, const ModeBasis& basis) {
  const std::size_t L = basis.sites();
  const std::size_t N = basis.components();
  if (static_cast<std::size_t>(amps.theta.rows()) != N || static_cast<std::size_t>(amps.theta.cols()) != L ||
      amps.tau.rows() != amps.theta.rows() || amps.tau.cols() != amps.theta.cols()) {
    throw std::invalid_argument("amplitudes_to_field: amplitude arrays do not match the mode basis");
  }
  Eigen::MatrixXcd theta(amps.theta.rows(), amps.theta.cols());
  Eigen::MatrixXcd tau(amps.tau.rows(), amps.tau.cols());
  for (std::size_t j = 0; j < N; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    for (std::size_t k = 0; k < L; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const auto mk = static_cast<Eigen::Index>(basis.mirror(k));
      const double defect = std::max(std::abs(amps.theta(jj, mk) - std::conj(amps.theta(jj, kk))),
                                     std::abs(amps.tau(jj, mk) - std::conj(amps.tau(jj, kk))));
      if (defect > kRealityTolerance) {
        std::ostringstream os;
        os << "amplitudes_to_field: reality condition violated at component " << j << ", k=" << k
           << " (defect " << defect << ")";
        throw std::invalid_argument(os.str());
      }
      theta(jj, kk) = 0.5 * (amps.theta(jj, kk) + std::conj(amps.theta(jj, mk)));
      tau(jj, kk) = 0.5 * (amps.tau(jj, kk) + std::conj(amps.tau(jj, mk)));
    }
  }
  const auto roots = unit_roots(L);
  const double norm = 1.0 / std::sqrt(basis.lattice().spacing * static_cast<double>(L));
  FieldState state(N, L);
  for (std::size_t j = 0; j < N; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    for (std::size_t x = 0; x < L; ++x) {
      Complex sphi = 0.0;
      Complex spi = 0.0;
      for (std::size_t k = 0; k < L; ++k) {
        const Complex phase = roots[(k * x) % L];
        const double w = basis.frequency(j, k);
        sphi += phase * theta(jj, static_cast<Eigen::Index>(k)) / std::sqrt(w);
        spi += phase * tau(jj, static_cast<Eigen::Index>(k)) * std::sqrt(w);
      }
      state.phi(jj, static_cast<Eigen::Index>(x)) = norm * sphi.real();
      state.pi(jj, static_cast<Eigen::Index>(x)) = norm * spi.real();
    }
  }
  return state;
}

ModeAmplitudes amplitudes_from_alpha(const Eigen::MatrixXcd& alpha, const ModeBasis& basis) {
  const std::size_t L = basis.sites();
  const std::size_t N = basis.components();
  if (static_cast<std::size_t>(alpha.rows()) != N || static_cast<std::size_t>(alpha.cols()) != L) {
    throw std::invalid_argument("amplitudes_from_alpha: alpha array does not match the mode basis");
  }
  ModeAmplitudes amps;
  amps.theta.resize(alpha.rows(), alpha.cols());
  amps.tau.resize(alpha.rows(), alpha.cols());
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < alpha.rows(); ++j) {
    for (std::size_t k = 0; k < L; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const Complex a = alpha(j, kk);
      const Complex b = std::conj(alpha(j, static_cast<Eigen::Index>(basis.mirror(k))));
      amps.theta(j, kk) = s * (a + b);
      amps.tau(j, kk) = s * (a - b) / kI;
    }
  }
  return amps;
}

Eigen::VectorXcd selected_alpha(const ModeAmplitudes& amps, const ModeBasis& basis) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(basis.mode_count()));
  for (std::size_t i = 0; i < basis.mode_count(); ++i) {
    const auto& sel = basis.selection()[i];
    out(static_cast<Eigen::Index>(i)) = amps.alpha(sel.component, sel.momentum);
  }
  return out;
}

Eigen::VectorXcd selected_alpha(const FieldState& state, const ModeBasis& basis) {
  return selected_alpha(field_to_amplitudes(state, basis), basis);
}

FieldState field_from_selected_alpha(const Eigen::VectorXcd& alpha, const ModeBasis& basis) {
  if (static_cast<std::size_t>(alpha.size()) != basis.mode_count()) {
    throw std::invalid_argument("field_from_selected_alpha: need one amplitude per selected mode");
  }
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(basis.components()),
                                                 static_cast<Eigen::Index>(basis.sites()));
  for (std::size_t i = 0; i < basis.mode_count(); ++i) {
    const auto& sel = basis.selection()[i];
    full(static_cast<Eigen::Index>(sel.component), static_cast<Eigen::Index>(sel.momentum)) =
        alpha(static_cast<Eigen::Index>(i));
  }
  return amplitudes_to_field(amplitudes_from_alpha(full, basis), basis);
}

FieldState project_onto_modes(const FieldState& state, const ModeBasis& basis) {
  return field_from_selected_alpha(selected_alpha(state, basis), basis);
}

double poisson_tail(double mean, std::size_t n_max) {
  if (mean < 0.0) throw std::invalid_argument("poisson_tail: negative mean");
  if (mean == 0.0) return 0.0;
  // Sum the terms above n_max directly; 1 - (head) loses everything below 1e-16.
  double term = std::exp(-mean);
  for (std::size_t n = 1; n <= n_max + 1; ++n) term *= mean / static_cast<double>(n);
  double tail = 0.0;
  for (std::size_t n = n_max + 1; term > 0.0; ++n) {
    tail += term;
    term *= mean / static_cast<double>(n + 1);
    if (term < 1e-300 || term < tail * 1e-17) break;
  }
  return std::min(tail, 1.0);
}

CoherentVector coherent_state(const Eigen::VectorXcd& alpha, const fock::FockSpec& fock) {
  if (static_cast<std::size_t>(alpha.size()) != fock.modes()) {
    throw std::invalid_argument("coherent_state: need one amplitude per Fock mode");
  }
  const std::size_t levels = fock.levels();
  std::vector<std::vector<Complex>> per_mode(fock.modes(), std::vector<Complex>(levels));
  double kept = 1.0;
  for (std::size_t m = 0; m < fock.modes(); ++m) {
    const Complex a = alpha(static_cast<Eigen::Index>(m));
    const double mean = std::norm(a);
    Complex c = std::exp(-0.5 * mean);
    for (std::size_t n = 0; n < levels; ++n) {
      per_mode[m][n] = c;
      c *= a / std::sqrt(static_cast<double>(n + 1));
    }
    kept *= 1.0 - poisson_tail(mean, fock.n_max());
  }
  CoherentVector out;
  out.alpha = alpha;
  out.tail_mass = std::max(0.0, 1.0 - kept);
  out.entries.resize(static_cast<Eigen::Index>(fock.dim()));
  for (std::size_t idx = 0; idx < fock.dim(); ++idx) {
    std::size_t rest = idx;
    Complex v = 1.0;
    for (std::size_t m = 0; m < fock.modes(); ++m) {
      v *= per_mode[m][rest % levels];
      rest /= levels;
    }
    out.entries(static_cast<Eigen::Index>(idx)) = v;
  }
  out.entries.normalize();
  return out;
}

CoherentVector coherent_vector(const FieldState& state, const ModeBasis& basis, const fock::FockSpec& fock) {
  if (fock.modes() != basis.mode_count()) {
    throw std::invalid_argument("coherent_vector: Fock space and mode basis disagree on the mode count");
  }
  CoherentVector v = coherent_state(selected_alpha(state, basis), fock);
  if (v.tail_mass > kTailWarnThreshold) {
    std::ostringstream os;
    os << "coherent_vector: truncation tail mass " << v.tail_mass << " exceeds " << kTailWarnThreshold
       << " at n_max=" << fock.n_max();
    warn(os.str());
  }
  return v;
}

double q_probability(const fock::DensityMatrix& rho, const FieldState& state, const ModeBasis& basis,
                     const fock::FockSpec& fock) {
  if (rho.dim() != fock.dim()) throw std::invalid_argument("q_probability: dimension mismatch");
  const fock::Vector v = coherent_vector(state, basis, fock).entries;
  const double q = v.dot(rho.entries() * v).real();
  return std::clamp(q, 0.0, 1.0);
}

double q_probability(const fock::Vector& psi, const FieldState& state, const ModeBasis& basis,
                     const fock::FockSpec& fock) {
  if (static_cast<std::size_t>(psi.size()) != fock.dim()) {
    throw std::invalid_argument("q_probability: dimension mismatch");
  }
  const fock::Vector v = coherent_vector(state, basis, fock).entries;
  return std::min(std::norm(v.dot(psi)) / psi.squaredNorm(), 1.0);
}

ClassicalEnsemble ClassicalEnsemble::point(FieldState state) {
  std::vector<WeightedState> m;
  m.push_back({std::move(state), 1.0});
  return ClassicalEnsemble(std::move(m));
}

ClassicalEnsemble ClassicalEnsemble::weighted(std::vector<WeightedState> members) {
  if (members.empty()) throw std::invalid_argument("ClassicalEnsemble: no members");
  double total = 0.0;
  for (const auto& m : members) {
    if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) {
      throw std::invalid_argument("ClassicalEnsemble: weights must be finite and >= 0");
    }
    total += m.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("ClassicalEnsemble: weights sum to zero");
  for (auto& m : members) m.weight /= total;
  return ClassicalEnsemble(std::move(members));
}

ClassicalEnsemble ClassicalEnsemble::sampler(GaussianSampler sampler) {
  for (Eigen::Index i = 0; i < sampler.widths.size(); ++i) {
    if (!(sampler.widths(i) >= 0.0)) throw std::invalid_argument("ClassicalEnsemble: widths must be >= 0");
  }
  return ClassicalEnsemble(std::move(sampler));
}

const std::vector<WeightedState>& ClassicalEnsemble::members() const {
  if (!is_finite()) throw std::logic_error("ClassicalEnsemble: sampler ensemble has no member list");
  return std::get<std::vector<WeightedState>>(content_);
}

const GaussianSampler& ClassicalEnsemble::gaussian() const {
  if (is_finite()) throw std::logic_error("ClassicalEnsemble: finite ensemble has no sampler");
  return std::get<GaussianSampler>(content_);
}

std::vector<FieldState> ClassicalEnsemble::draw(const ModeBasis& basis, std::size_t count) const {
  const GaussianSampler& g = gaussian();
  if (static_cast<std::size_t>(g.widths.size()) != basis.mode_count()) {
    throw std::invalid_argument("ClassicalEnsemble::draw: need one width per selected mode");
  }
  const Eigen::VectorXcd center = selected_alpha(g.base, basis);
  std::mt19937_64 rng(g.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<FieldState> out;
  out.reserve(count);
  Eigen::VectorXcd alpha(center.size());
  for (std::size_t s = 0; s < count; ++s) {
    for (Eigen::Index i = 0; i < center.size(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      alpha(i) = center(i) + g.widths(i) * Complex(re, im);
    }
    out.push_back(field_from_selected_alpha(alpha, basis));
  }
  return out;
}

namespace {

fock::DensityMatrix finish_density(fock::Matrix rho) {
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return fock::DensityMatrix(std::move(rho));
}

}  // namespace

PReconstruction p_reconstruct(const ClassicalEnsemble& ensemble, const ModeBasis& basis,
                              const fock::FockSpec& fock, std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("p_reconstruct: zero samples");
  if (fock.modes() != basis.mode_count()) {
    throw std::invalid_argument("p_reconstruct: Fock space and mode basis disagree on the mode count");
  }
  const auto d = static_cast<Eigen::Index>(fock.dim());
  fock::Matrix rho = fock::Matrix::Zero(d, d);
  double max_tail = 0.0;
  if (ensemble.is_finite()) {
    for (const auto& m : ensemble.members()) {
      const CoherentVector v = coherent_vector(m.state, basis, fock);
      max_tail = std::max(max_tail, v.tail_mass);
      rho.noalias() += m.weight * (v.entries * v.entries.adjoint());
    }
    return PReconstruction{finish_density(std::move(rho)), 0.0, ensemble.members().size(), max_tail};
  }
  // Draw in chunks to bound memory for large sample counts.
  const GaussianSampler& g = ensemble.gaussian();
  if (static_cast<std::size_t>(g.widths.size()) != basis.mode_count()) {
    throw std::invalid_argument("p_reconstruct: need one width per selected mode");
  }
  const Eigen::VectorXcd center = selected_alpha(g.base, basis);
  std::mt19937_64 rng(g.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd alpha(center.size());
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < center.size(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      alpha(i) = center(i) + g.widths(i) * Complex(re, im);
    }
    // The draw is already expressed in selected-mode amplitudes.
    const CoherentVector v = coherent_state(alpha, fock);
    max_tail = std::max(max_tail, v.tail_mass);
    rho.selfadjointView<Eigen::Lower>().rankUpdate(v.entries);
  }
  rho.triangularView<Eigen::StrictlyUpper>() = rho.adjoint();
  rho /= static_cast<double>(samples);
  if (max_tail > kTailWarnThreshold) {
    std::ostringstream os;
    os << "p_reconstruct: largest truncation tail mass " << max_tail << " at n_max=" << fock.n_max();
    warn(os.str());
  }
  // E|P - rho|_F^2 = 1 - |rho|_F^2 for normalized projectors P.
  const double spread = std::max(0.0, 1.0 - rho.squaredNorm());
  const double n = static_cast<double>(samples);
  const double se = samples > 1 ? std::sqrt(spread / (n - 1.0)) : std::sqrt(spread);
  return PReconstruction{finish_density(std::move(rho)), se, samples, max_tail};
}

Records EnergyEquivalenceReport::records() const {
  return {{"lhs", lhs},
          {"rhs", rhs},
          {"abs_err", abs_err},
          {"rel_err", rel_err},
          {"max_tail_mass", max_tail_mass},
          {"projection_residual", projection_residual},
          {"members", static_cast<double>(members)}};
}

EnergyEquivalenceReport check_energy_equivalence(const ClassicalEnsemble& ensemble,
                                                 const field::FieldModel& model, const ModeBasis& basis,
                                                 const fock::FockSpec& fock, std::size_t samples) {
  return check_energy_equivalence(ensemble, model, basis, fock, normal_ordered_hamiltonian(fock, model, basis),
                                  samples);
}

EnergyEquivalenceReport check_energy_equivalence(const ClassicalEnsemble& ensemble,
                                                 const field::FieldModel& model, const ModeBasis& basis,
                                                 const fock::FockSpec& fock, const fock::OperatorMatrix& hn,
                                                 std::size_t samples) {
  if (hn.dim() != fock.dim()) throw std::invalid_argument("check_energy_equivalence: H_n dimension mismatch");
  if (model.lattice != basis.lattice() || model.masses != basis.masses()) {
    throw std::invalid_argument("check_energy_equivalence: model and mode basis disagree on lattice or masses");
  }
  EnergyEquivalenceReport r;
  auto accumulate = [&](const FieldState& state, double weight) {
    const CoherentVector v = coherent_state(selected_alpha(state, basis), fock);
    r.max_tail_mass = std::max(r.max_tail_mass, v.tail_mass);
    r.lhs += weight * fock::expectation(v.entries, hn).real();
    r.rhs += weight * field::classical_energy(state, model);
  };
  if (ensemble.is_finite()) {
    for (const auto& m : ensemble.members()) {
      const FieldState projected = project_onto_modes(m.state, basis);
      r.projection_residual =
          std::max({r.projection_residual, (projected.phi - m.state.phi).cwiseAbs().maxCoeff(),
                    (projected.pi - m.state.pi).cwiseAbs().maxCoeff()});
      accumulate(projected, m.weight);
    }
    r.members = ensemble.members().size();
  } else {
    if (samples == 0) throw std::invalid_argument("check_energy_equivalence: zero samples");
    const double w = 1.0 / static_cast<double>(samples);
    for (const auto& s : ensemble.draw(basis, samples)) accumulate(s, w);
    r.members = samples;
  }
  if (r.max_tail_mass > kTailWarnThreshold) {
    std::ostringstream os;
    os << "check_energy_equivalence: truncation tail mass " << r.max_tail_mass << " at n_max=" << fock.n_max();
    warn(os.str());
  }
  r.abs_err = std::abs(r.lhs - r.rhs);
  r.rel_err = r.rhs != 0.0 ? r.abs_err / std::abs(r.rhs) : r.abs_err;
  return r;
}

double gaussian_q_prediction(const FieldState& state, const FieldState& base, const ModeBasis& basis) {
  const ModeAmplitudes a = field_to_amplitudes(state, basis);
  const ModeAmplitudes b = field_to_amplitudes(base, basis);
  const double exponent = (a.theta - b.theta).squaredNorm() + (a.tau - b.tau).squaredNorm();
  return std::exp(-0.5 * exponent);
}

Records QGaussianReport::records() const {
  return {{"max_rel_dev", max_rel_dev},
          {"max_tail_mass", max_tail_mass},
          {"min_q", min_q},
          {"probes", static_cast<double>(probes)}};
}

QGaussianReport q_gaussian_check(const FieldState& base, const ModeBasis& basis, const fock::FockSpec& fock,
                                 std::size_t probes, std::uint64_t seed, double probe_width) {
  if (probes == 0) throw std::invalid_argument("q_gaussian_check: need at least one probe");
  const FieldState s0 = project_onto_modes(base, basis);
  const CoherentVector v0 = coherent_vector(s0, basis, fock);
  const Eigen::VectorXcd alpha0 = v0.alpha;

  QGaussianReport r;
  r.probes = probes;
  r.max_tail_mass = v0.tail_mass;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < probes; ++i) {
    Eigen::VectorXcd alpha = alpha0;
    if (i > 0) {
      for (Eigen::Index m = 0; m < alpha.size(); ++m) {
        const double re = normal(rng);
        const double im = normal(rng);
        alpha(m) += probe_width * Complex(re, im);
      }
    }
    const FieldState probe = field_from_selected_alpha(alpha, basis);
    const CoherentVector v = coherent_vector(probe, basis, fock);
    r.max_tail_mass = std::max(r.max_tail_mass, v.tail_mass);
    const double q = std::norm(v.entries.dot(v0.entries));
    const double predicted = gaussian_q_prediction(probe, s0, basis);
    r.min_q = std::min(r.min_q, q);
    r.max_rel_dev = std::max(r.max_rel_dev, std::abs(q - predicted) / predicted);
  }
  return r;
}

}  // namespace qlab::pq
