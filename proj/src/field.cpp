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

#include "qlab/field.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace qlab::field {

LatticeSpec::LatticeSpec(std::size_t sites_, double spacing_) : sites(sites_), spacing(spacing_) {
  if (sites < 2) throw std::invalid_argument("LatticeSpec: need at least 2 sites");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw std::invalid_argument("LatticeSpec: spacing must be positive and finite");
  }
}

FieldState::FieldState(std::size_t components, std::size_t sites)
    : phi(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(components), static_cast<Eigen::Index>(sites))),
      pi(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(components), static_cast<Eigen::Index>(sites))),
      twist(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(components))) {}

bool FieldState::all_finite() const {
  return phi.allFinite() && pi.allFinite() && twist.allFinite();
}

bool FieldState::has_twist() const { return twist.size() > 0 && twist.cwiseAbs().maxCoeff() != 0.0; }

std::string to_string(Potential p) {
  switch (p) {
    case Potential::free: return "free";
    case Potential::phi4: return "phi4";
    case Potential::sine_gordon: return "sine_gordon";
  }
  return "unknown";
}

Potential potential_from_string(const std::string& name) {
  if (name == "free") return Potential::free;
  if (name == "phi4") return Potential::phi4;
  if (name == "sine_gordon") return Potential::sine_gordon;
  throw std::invalid_argument("unknown potential '" + name + "' (expected free, phi4, sine_gordon)");
}

FieldModel::FieldModel(LatticeSpec lattice_, std::vector<double> masses_, Potential potential_,
                       double coupling_)
    : lattice(lattice_), masses(std::move(masses_)), potential(potential_), coupling(coupling_) {
  if (masses.empty()) throw std::invalid_argument("FieldModel: need at least one component");
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("FieldModel: masses must be >= 0");
  }
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) {
    throw std::invalid_argument("FieldModel: coupling must be finite and >= 0");
  }
  if (potential == Potential::sine_gordon) {
    if (!(coupling > 0.0)) throw std::invalid_argument("FieldModel: sine-Gordon needs lambda > 0");
    for (double m : masses) {
      if (!(m > 0.0)) throw std::invalid_argument("FieldModel: sine-Gordon needs m > 0");
    }
  }
}

double FieldModel::potential_value(std::size_t j, double phi) const {
  switch (potential) {
    case Potential::free: return 0.0;
    case Potential::phi4: return coupling * phi * phi * phi * phi;
    case Potential::sine_gordon: {
      const double m = masses[j];
      const double beta = std::sqrt(coupling) / m;
      return (m * m * m * m / coupling) * (1.0 - std::cos(beta * phi));
    }
  }
  return 0.0;
}

double FieldModel::potential_derivative(std::size_t j, double phi) const {
  switch (potential) {
    case Potential::free: return 0.0;
    case Potential::phi4: return 4.0 * coupling * phi * phi * phi;
    case Potential::sine_gordon: {
      const double m = masses[j];
      const double beta = std::sqrt(coupling) / m;
      return (m * m * m / std::sqrt(coupling)) * std::sin(beta * phi);
    }
  }
  return 0.0;
}

double FieldModel::sine_gordon_period(std::size_t j) const {
  if (potential != Potential::sine_gordon) {
    throw std::logic_error("sine_gordon_period: model is not sine-Gordon");
  }
  return 2.0 * std::numbers::pi * masses[j] / std::sqrt(coupling);
}

namespace {

void check_shapes(const FieldState& state, const FieldModel& model) {
  if (state.components() != model.components() || state.sites() != model.lattice.sites ||
      state.pi.rows() != state.phi.rows() || state.pi.cols() != state.phi.cols() ||
      static_cast<std::size_t>(state.twist.size()) != model.components()) {
    throw std::invalid_argument("field state shape does not match model (" +
                                std::to_string(state.components()) + "x" +
                                std::to_string(state.sites()) + " vs " +
                                std::to_string(model.components()) + "x" +
                                std::to_string(model.lattice.sites) + ")");
  }
}

bool has_mass_term(const FieldModel& model) { return model.potential != Potential::sine_gordon; }

}  // namespace

double classical_energy(const FieldState& state, const FieldModel& model) {
  check_shapes(state, model);
  if (!state.all_finite()) throw std::invalid_argument("classical_energy: non-finite field values");
  const std::size_t L = model.lattice.sites;
  const double a = model.lattice.spacing;
  double total = 0.0;
  for (std::size_t j = 0; j < model.components(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double m2 = has_mass_term(model) ? model.masses[j] * model.masses[j] : 0.0;
    double sum = 0.0;
    for (std::size_t x = 0; x < L; ++x) {
      const auto xx = static_cast<Eigen::Index>(x);
      const double phi = state.phi(jj, xx);
      const double next = (x + 1 == L) ? state.phi(jj, 0) + state.twist(jj) : state.phi(jj, xx + 1);
      const double grad = (next - phi) / a;
      const double p = state.pi(jj, xx);
      sum += 0.5 * p * p + 0.5 * grad * grad + 0.5 * m2 * phi * phi + model.potential_value(j, phi);
    }
    total += sum;
  }
  return a * total;
}

Eigen::MatrixXd field_force(const FieldState& state, const FieldModel& model) {
  check_shapes(state, model);
  const std::size_t L = model.lattice.sites;
  const double inv_a2 = 1.0 / (model.lattice.spacing * model.lattice.spacing);
  Eigen::MatrixXd force(state.phi.rows(), state.phi.cols());
  for (std::size_t j = 0; j < model.components(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double m2 = has_mass_term(model) ? model.masses[j] * model.masses[j] : 0.0;
    const double tw = state.twist(jj);
    for (std::size_t x = 0; x < L; ++x) {
      const auto xx = static_cast<Eigen::Index>(x);
      const double phi = state.phi(jj, xx);
      const double next = (x + 1 == L) ? state.phi(jj, 0) + tw : state.phi(jj, xx + 1);
      const double prev = (x == 0) ? state.phi(jj, static_cast<Eigen::Index>(L - 1)) - tw
                                   : state.phi(jj, xx - 1);
      force(jj, xx) = (next - 2.0 * phi + prev) * inv_a2 - m2 * phi -
                      model.potential_derivative(j, phi);
    }
  }
  return force;
}

FieldState leapfrog_step(const FieldState& state, const FieldModel& model, double dt,
                         const Eigen::MatrixXd* source, std::size_t step_index) {
  if (!(dt > 0.0)) throw std::invalid_argument("leapfrog_step: dt must be positive");
  if (source && (source->rows() != state.phi.rows() || source->cols() != state.phi.cols())) {
    throw std::invalid_argument("leapfrog_step: source shape mismatch");
  }
  const double half = 0.5 * dt;
  FieldState next = state;
  Eigen::MatrixXd force = field_force(next, model);
  if (source) force += *source;
  next.pi += half * force;
  next.phi += dt * next.pi;
  force = field_force(next, model);
  if (source) force += *source;
  next.pi += half * force;
  if (!next.all_finite()) {
    throw BlowUpError(step_index, "leapfrog_step: non-finite field at step " + std::to_string(step_index));
  }
  return next;
}

std::vector<FieldState> integrate(const FieldState& state, const FieldModel& model, double dt,
                                  std::size_t steps) {
  std::vector<FieldState> trajectory;
  trajectory.reserve(steps + 1);
  trajectory.push_back(state);
  for (std::size_t k = 0; k < steps; ++k) {
    trajectory.push_back(leapfrog_step(trajectory.back(), model, dt, nullptr, k));
  }
  return trajectory;
}

double site_position(const LatticeSpec& lattice, std::size_t i) {
  return (static_cast<double>(i) - 0.5 * static_cast<double>(lattice.sites - 1)) * lattice.spacing;
}

namespace {

struct InitialBuilder {
  const FieldModel& model;

  FieldState operator()(const Vacuum&) const {
    return FieldState(model.components(), model.lattice.sites);
  }

  FieldState operator()(const Kink& kink) const {
    if (model.potential != Potential::sine_gordon) {
      throw std::invalid_argument("make_initial_state: kink requires a sine-Gordon model");
    }
    FieldState s(model.components(), model.lattice.sites);
    for (std::size_t j = 0; j < model.components(); ++j) {
      const double m = model.masses[j];
      const double amp = 4.0 * m / std::sqrt(model.coupling);
      for (std::size_t i = 0; i < model.lattice.sites; ++i) {
        const double x = site_position(model.lattice, i) - kink.center;
        s.phi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = amp * std::atan(std::exp(m * x));
      }
      s.twist(static_cast<Eigen::Index>(j)) = model.sine_gordon_period(j);
    }
    return s;
  }

  FieldState operator()(const PlaneWave& wave) const {
    if (!std::isfinite(wave.amplitude)) throw std::invalid_argument("make_initial_state: bad amplitude");
    FieldState s(model.components(), model.lattice.sites);
    const double k = 2.0 * std::numbers::pi * wave.wave_number / model.lattice.length();
    for (std::size_t i = 0; i < model.lattice.sites; ++i) {
      const double y = static_cast<double>(i) * model.lattice.spacing;
      s.phi.col(static_cast<Eigen::Index>(i)).setConstant(wave.amplitude * std::cos(k * y));
    }
    return s;
  }

  FieldState operator()(const GaussianRandom& g) const {
    if (!(g.sigma >= 0.0)) throw std::invalid_argument("make_initial_state: sigma must be >= 0");
    FieldState s(model.components(), model.lattice.sites);
    std::mt19937_64 rng(g.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < s.phi.rows(); ++j) {
      for (Eigen::Index x = 0; x < s.phi.cols(); ++x) s.phi(j, x) = g.sigma * normal(rng);
    }
    for (Eigen::Index j = 0; j < s.pi.rows(); ++j) {
      for (Eigen::Index x = 0; x < s.pi.cols(); ++x) s.pi(j, x) = g.sigma * normal(rng);
    }
    return s;
  }
};

}  // namespace

FieldState make_initial_state(const InitialKind& kind, const FieldModel& model) {
  return std::visit(InitialBuilder{model}, kind);
}

double kink_mass(double mass, double coupling) { return 8.0 * mass * mass * mass / coupling; }

double lattice_frequency(double mass, double momentum, double spacing) {
  const double s = std::sin(0.5 * momentum * spacing);
  return std::sqrt(mass * mass + 4.0 * s * s / (spacing * spacing));
}

}  // namespace qlab::field
