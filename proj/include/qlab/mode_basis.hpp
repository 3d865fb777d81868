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

#ifndef QLAB_MODE_BASIS_HPP
#define QLAB_MODE_BASIS_HPP

#include <optional>
#include <vector>

#include "qlab/field.hpp"

namespace qlab::pq {

// Frequency used to scale mode amplitudes.
//   lattice:   w^2 = m^2 + (4/a^2) sin^2(p a/2), the dispersion of the
//              discrete energy; the classical and Fock energies agree exactly.
//   continuum: w^2 = m^2 + p^2, its a -> 0 limit.
enum class Dispersion { lattice, continuum };

// A lattice momentum p_k = 2 pi k / (L a) of field component j.
struct ModeIndex {
  std::size_t component;
  std::size_t momentum;

  bool operator==(const ModeIndex&) const = default;
};

// Momentum grid, frequencies, and the injective map from selected (j, p)
// pairs onto Fock modes: Fock mode i is selection()[i].
class ModeBasis {
 public:
  ModeBasis(field::LatticeSpec lattice, std::vector<double> masses, std::vector<ModeIndex> selection,
            Dispersion dispersion = Dispersion::lattice);

  // Every (j, p) pair; allowed only when components * sites <= 3.
  static ModeBasis all_modes(field::LatticeSpec lattice, std::vector<double> masses,
                             Dispersion dispersion = Dispersion::lattice);

  // The `count` modes of smallest |p|; ties by component, then p >= 0 first.
  static ModeBasis lowest_modes(field::LatticeSpec lattice, std::vector<double> masses, std::size_t count,
                                Dispersion dispersion = Dispersion::lattice);

  const field::LatticeSpec& lattice() const { return lattice_; }
  const std::vector<double>& masses() const { return masses_; }
  std::size_t components() const { return masses_.size(); }
  std::size_t sites() const { return lattice_.sites; }
  Dispersion dispersion() const { return dispersion_; }

  // Signed momentum of index k, wrapped into (-pi/a, pi/a].
  double momentum(std::size_t k) const;
  double frequency(std::size_t component, std::size_t k) const;
  // k -> index of -p_k.
  std::size_t mirror(std::size_t k) const;

  std::size_t mode_count() const { return selection_.size(); }
  const std::vector<ModeIndex>& selection() const { return selection_; }
  std::optional<std::size_t> fock_mode(std::size_t component, std::size_t k) const;
  double selected_frequency(std::size_t fock_mode) const;

 private:
  field::LatticeSpec lattice_;
  std::vector<double> masses_;
  std::vector<ModeIndex> selection_;
  Dispersion dispersion_;
};

}  // namespace qlab::pq

#endif  // QLAB_MODE_BASIS_HPP
