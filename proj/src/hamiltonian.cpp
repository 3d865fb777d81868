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

#include "qlab/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "qlab/warnings.hpp"

namespace qlab::pq {

using fock::Complex;
using fock::Ladder;
using fock::LadderPolynomial;
using fock::Ordering;

namespace {

Complex site_phase(const ModeBasis& basis, std::size_t k, std::size_t site) {
  const std::size_t L = basis.sites();
  const double angle = 2.0 * std::numbers::pi * static_cast<double>((k * site) % L) / static_cast<double>(L);
  return std::polar(1.0, angle);
}

// u_i(x) for selected mode i.
Complex field_coefficient(const ModeBasis& basis, std::size_t mode, std::size_t site) {
  const auto& sel = basis.selection()[mode];
  const double w = basis.frequency(sel.component, sel.momentum);
  const double a = basis.lattice().spacing;
  const double L = static_cast<double>(basis.sites());
  return site_phase(basis, sel.momentum, site) / std::sqrt(2.0 * L * a * w);
}

void check_model(const field::FieldModel& model, const ModeBasis& basis) {
  if (model.lattice != basis.lattice() || model.masses != basis.masses()) {
    throw std::invalid_argument("hamiltonian: field model and mode basis disagree on lattice or masses");
  }
}

// exp(z a) on one truncated mode: <n-k| exp(z a) |n> = z^k/k! sqrt(n!/(n-k)!).
fock::Matrix single_mode_exponential(Complex z, std::size_t levels) {
  const auto n_levels = static_cast<Eigen::Index>(levels);
  fock::Matrix e = fock::Matrix::Zero(n_levels, n_levels);
  for (std::size_t n = 0; n < levels; ++n) {
    Complex c = 1.0;
    for (std::size_t k = 0; k <= n; ++k) {
      e(static_cast<Eigen::Index>(n - k), static_cast<Eigen::Index>(n)) = c;
      // c_{k+1} = c_k * z * sqrt(n - k) / (k + 1)
      c *= z * std::sqrt(static_cast<double>(n - k)) / static_cast<double>(k + 1);
    }
  }
  return e;
}

// exp(sum_i z_i a_i) as a dense Kronecker product, mode 0 fastest.
fock::Matrix multimode_exponential(const std::vector<Complex>& z, std::size_t levels) {
  fock::Matrix out = single_mode_exponential(z[0], levels);
  for (std::size_t m = 1; m < z.size(); ++m) {
    fock::Matrix next = Eigen::kroneckerProduct(single_mode_exponential(z[m], levels), out).eval();
    out = std::move(next);
  }
  return out;
}

}  // namespace

LadderPolynomial field_operator(const ModeBasis& basis, std::size_t component, std::size_t site) {
  if (component >= basis.components() || site >= basis.sites()) {
    throw std::out_of_range("field_operator: component or site out of range");
  }
  LadderPolynomial phi;
  for (std::size_t i = 0; i < basis.mode_count(); ++i) {
    if (basis.selection()[i].component != component) continue;
    const Complex u = field_coefficient(basis, i, site);
    phi.add({Ladder{i, false}}, u);
    phi.add({Ladder{i, true}}, std::conj(u));
  }
  return phi;
}

LadderPolynomial momentum_operator(const ModeBasis& basis, std::size_t component, std::size_t site) {
  if (component >= basis.components() || site >= basis.sites()) {
    throw std::out_of_range("momentum_operator: component or site out of range");
  }
  const double a = basis.lattice().spacing;
  const double L = static_cast<double>(basis.sites());
  LadderPolynomial pi;
  for (std::size_t i = 0; i < basis.mode_count(); ++i) {
    const auto& sel = basis.selection()[i];
    if (sel.component != component) continue;
    const double w = basis.frequency(sel.component, sel.momentum);
    const Complex v = Complex(0.0, -1.0) * std::sqrt(w / (2.0 * a * L)) * site_phase(basis, sel.momentum, site);
    pi.add({Ladder{i, false}}, v);
    pi.add({Ladder{i, true}}, std::conj(v));
  }
  return pi;
}

LadderPolynomial polynomial_hamiltonian(const field::FieldModel& model, const ModeBasis& basis,
                                        Ordering ordering) {
  check_model(model, basis);
  LadderPolynomial h;
  for (std::size_t i = 0; i < basis.mode_count(); ++i) {
    const double w = basis.selected_frequency(i);
    if (ordering == Ordering::normal) {
      h.add({Ladder{i, true}, Ladder{i, false}}, w);
    } else {
      h.add({Ladder{i, false}, Ladder{i, true}}, w);
    }
  }
  const double a = model.lattice.spacing;
  for (std::size_t j = 0; j < model.components(); ++j) {
    for (std::size_t x = 0; x < model.lattice.sites; ++x) {
      const LadderPolynomial phi = field_operator(basis, j, x);
      if (phi.terms().empty()) continue;
      switch (model.potential) {
        case field::Potential::free:
          break;
        case field::Potential::phi4:
          if (model.coupling != 0.0) h += Complex(a * model.coupling) * phi.pow(4).ordered(ordering);
          break;
        case field::Potential::sine_gordon: {
          const double m = model.masses[j];
          h -= Complex(0.5 * a * m * m) * phi.pow(2).ordered(ordering);
          break;
        }
      }
    }
  }
  return h.prune(1e-15);
}

fock::OperatorMatrix ordered_hamiltonian(const fock::FockSpec& fock, const field::FieldModel& model,
                                         const ModeBasis& basis, Ordering ordering) {
  check_model(model, basis);
  if (fock.modes() != basis.mode_count()) {
    throw std::invalid_argument("hamiltonian: Fock space and mode basis disagree on the mode count");
  }
  const bool sine_gordon = model.potential == field::Potential::sine_gordon;
  if (sine_gordon && ordering == Ordering::anti_normal) {
    throw std::invalid_argument(
        "hamiltonian: anti-normal ordering of a non-polynomial (sine-Gordon) potential is unsupported");
  }
  const std::size_t degree = model.potential == field::Potential::phi4 ? 4 : 2;
  if (fock.n_max() < degree) {
    warn("hamiltonian: n_max=" + std::to_string(fock.n_max()) + " is below the polynomial degree " +
         std::to_string(degree) + "; high-order terms are truncated");
  }

  fock::OperatorMatrix h = fock::compress(fock, polynomial_hamiltonian(model, basis, ordering), true);
  if (!sine_gordon) return h;

  if (fock.dim() > kExponentialDenseLimit) {
    throw std::invalid_argument("hamiltonian: sine-Gordon exponentials need dim <= " +
                                std::to_string(kExponentialDenseLimit));
  }
  const auto d = static_cast<Eigen::Index>(fock.dim());
  const double a = model.lattice.spacing;
  fock::Matrix exp_part = fock::Matrix::Zero(d, d);
  for (std::size_t j = 0; j < model.components(); ++j) {
    const double m = model.masses[j];
    const double beta = std::sqrt(model.coupling) / m;
    const double scale = a * m * m * m * m / model.coupling;
    for (std::size_t x = 0; x < model.lattice.sites; ++x) {
      std::vector<Complex> za(fock.modes(), 0.0);
      std::vector<Complex> zb(fock.modes(), 0.0);
      for (std::size_t i = 0; i < basis.mode_count(); ++i) {
        if (basis.selection()[i].component != j) continue;
        const Complex u = field_coefficient(basis, i, x);
        za[i] = Complex(0.0, beta) * u;
        zb[i] = Complex(0.0, -beta) * u;
      }
      const fock::Matrix A = multimode_exponential(za, fock.levels());
      const fock::Matrix B = multimode_exponential(zb, fock.levels());
      const fock::Matrix cos_op = 0.5 * (B.adjoint() * A + A.adjoint() * B);
      exp_part -= scale * cos_op;
      exp_part.diagonal().array() += scale;
    }
  }
  exp_part = 0.5 * (exp_part + exp_part.adjoint()).eval();
  fock::SparseMatrix total = h.entries() + fock::SparseMatrix(exp_part.sparseView());
  total = 0.5 * (total + fock::SparseMatrix(total.adjoint()));
  return fock::OperatorMatrix(std::move(total), true);
}

fock::OperatorMatrix normal_ordered_hamiltonian(const fock::FockSpec& fock, const field::FieldModel& model,
                                                const ModeBasis& basis) {
  return ordered_hamiltonian(fock, model, basis, Ordering::normal);
}

fock::OperatorMatrix anti_normal_ordered_hamiltonian(const fock::FockSpec& fock,
                                                     const field::FieldModel& model, const ModeBasis& basis) {
  return ordered_hamiltonian(fock, model, basis, Ordering::anti_normal);
}

}  // namespace qlab::pq
