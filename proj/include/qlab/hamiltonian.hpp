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

#ifndef QLAB_HAMILTONIAN_HPP
#define QLAB_HAMILTONIAN_HPP

#include "qlab/field.hpp"
#include "qlab/fock.hpp"
#include "qlab/ladder.hpp"
#include "qlab/mode_basis.hpp"

namespace qlab::pq {

// Field operators restricted to the selected modes, e.g.
//   phi_j(x) = sum_i (u_i(x) a_i + conj(u_i(x)) a_i^H),
//   u_i(x) = exp(i p_i x a) / sqrt(2 L a w_i),
// summed over selected modes i of component j. Site x is a lattice index.
fock::LadderPolynomial field_operator(const ModeBasis& basis, std::size_t component, std::size_t site);
fock::LadderPolynomial momentum_operator(const ModeBasis& basis, std::size_t component, std::size_t site);

// Lattice energy functional written in ladder operators and ordered:
// sum_i w_i a_i^H a_i (or a_i a_i^H) plus a * sum_x sum_j ordered(V(phi_j(x)))
// for polynomial potentials. The sine-Gordon polynomial part is the
// -(m^2/2) phi^2 correction that accompanies the exponential terms.
fock::LadderPolynomial polynomial_hamiltonian(const field::FieldModel& model, const ModeBasis& basis,
                                              fock::Ordering ordering);

// Ordered Hamiltonian compressed onto the truncated Fock space.
//
// Sine-Gordon uses normal-ordered exponentials,
//   :cos(b phi): = (B^H A + A^H B)/2,  A = exp(i b phi_+),  B = exp(-i b phi_+),
// with phi_+ the annihilation part; truncated phi_+ is nilpotent, so the
// series is finite and the compression exact. Anti-normal ordering of the
// sine-Gordon potential is rejected. Warns when n_max is below the
// polynomial degree.
fock::OperatorMatrix ordered_hamiltonian(const fock::FockSpec& fock, const field::FieldModel& model,
                                         const ModeBasis& basis, fock::Ordering ordering);

fock::OperatorMatrix normal_ordered_hamiltonian(const fock::FockSpec& fock, const field::FieldModel& model,
                                                const ModeBasis& basis);
fock::OperatorMatrix anti_normal_ordered_hamiltonian(const fock::FockSpec& fock,
                                                     const field::FieldModel& model, const ModeBasis& basis);

/// Dimension cap for the dense sine-Gordon exponential construction.
inline constexpr std::size_t kExponentialDenseLimit = 2048;

}  // namespace qlab::pq

#endif  // QLAB_HAMILTONIAN_HPP
