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

#include "qlab/mode_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlab::pq {

ModeBasis::ModeBasis(field::LatticeSpec lattice, std::vector<double> masses,
                     std::vector<ModeIndex> selection, Dispersion dispersion)
    : lattice_(lattice), masses_(std::move(masses)), selection_(std::move(selection)),
      dispersion_(dispersion) {
  if (masses_.empty()) throw std::invalid_argument("ModeBasis: need at least one component");
  for (double m : masses_) {
    // Every component has a p = 0 mode, whose frequency is m.
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("ModeBasis: masses must be positive (w(0) = m must not vanish)");
    }
  }
  if (selection_.empty()) throw std::invalid_argument("ModeBasis: empty mode selection");
  for (std::size_t i = 0; i < selection_.size(); ++i) {
    const auto& s = selection_[i];
    if (s.component >= masses_.size() || s.momentum >= lattice_.sites) {
      throw std::out_of_range("ModeBasis: selected mode out of range");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (selection_[k] == s) throw std::invalid_argument("ModeBasis: mode selected twice");
    }
  }
}

ModeBasis ModeBasis::all_modes(field::LatticeSpec lattice, std::vector<double> masses,
                               Dispersion dispersion) {
  if (masses.size() * lattice.sites > 3) {
    throw std::invalid_argument(
        "ModeBasis::all_modes: more than 3 modes; select a subset with lowest_modes");
  }
  std::vector<ModeIndex> sel;
  for (std::size_t j = 0; j < masses.size(); ++j) {
    for (std::size_t k = 0; k < lattice.sites; ++k) sel.push_back({j, k});
  }
  return ModeBasis(lattice, std::move(masses), std::move(sel), dispersion);
}

ModeBasis ModeBasis::lowest_modes(field::LatticeSpec lattice, std::vector<double> masses,
                                  std::size_t count, Dispersion dispersion) {
  const std::size_t L = lattice.sites;
  if (count == 0 || count > masses.size() * L) {
    throw std::invalid_argument("ModeBasis::lowest_modes: bad mode count");
  }
  struct Candidate {
    std::size_t wrapped_abs;
    bool negative;
    std::size_t component;
    std::size_t k;
  };
  std::vector<Candidate> all;
  for (std::size_t j = 0; j < masses.size(); ++j) {
    for (std::size_t k = 0; k < L; ++k) {
      const bool neg = 2 * k > L;
      all.push_back({neg ? L - k : k, neg, j, k});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.wrapped_abs != b.wrapped_abs) return a.wrapped_abs < b.wrapped_abs;
    if (a.component != b.component) return a.component < b.component;
    return a.negative < b.negative;
  });
  std::vector<ModeIndex> sel;
  for (std::size_t i = 0; i < count; ++i) sel.push_back({all[i].component, all[i].k});
  return ModeBasis(lattice, std::move(masses), std::move(sel), dispersion);
}

double ModeBasis::momentum(std::size_t k) const {
  if (k >= lattice_.sites) throw std::out_of_range("ModeBasis::momentum: index out of range");
  const auto L = static_cast<long long>(lattice_.sites);
  long long n = static_cast<long long>(k);
  if (2 * n > L) n -= L;
  return 2.0 * std::numbers::pi * static_cast<double>(n) / lattice_.length();
}

double ModeBasis::frequency(std::size_t component, std::size_t k) const {
  const double m = masses_.at(component);
  const double p = momentum(k);
  if (dispersion_ == Dispersion::lattice) return field::lattice_frequency(m, p, lattice_.spacing);
  return std::sqrt(m * m + p * p);
}

std::size_t ModeBasis::mirror(std::size_t k) const {
  if (k >= lattice_.sites) throw std::out_of_range("ModeBasis::mirror: index out of range");
  return k == 0 ? 0 : lattice_.sites - k;
}

std::optional<std::size_t> ModeBasis::fock_mode(std::size_t component, std::size_t k) const {
  for (std::size_t i = 0; i < selection_.size(); ++i) {
    if (selection_[i].component == component && selection_[i].momentum == k) return i;
  }
  return std::nullopt;
}

double ModeBasis::selected_frequency(std::size_t fock_mode) const {
  const auto& s = selection_.at(fock_mode);
  return frequency(s.component, s.momentum);
}

}  // namespace qlab::pq
