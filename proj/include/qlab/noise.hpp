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

#ifndef QLAB_NOISE_HPP
#define QLAB_NOISE_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qlab/field.hpp"

namespace qlab::field {

// Gaussian white-noise sources appended to the pi equation of the driven
// components. `driven` lists which field components carry a source; its
// length is m and sigma is the m x m covariance between them.
struct NoiseSpec {
  std::vector<std::size_t> driven;
  Eigen::MatrixXd sigma;
  std::uint64_t seed = 0;

  NoiseSpec() = default;
  NoiseSpec(std::vector<std::size_t> driven, Eigen::MatrixXd sigma, std::uint64_t seed);

  // First m components driven.
  static NoiseSpec first_components(std::size_t m, Eigen::MatrixXd sigma, std::uint64_t seed);

  std::size_t sources() const { return driven.size(); }
};

// Pre-drawn source values s_i(x, t_k) for a whole integration window. Each
// per-site draw is N(0, sigma) scaled by 1/sqrt(a dt).
class NoiseBlock {
 public:
  NoiseBlock(std::vector<std::size_t> driven, std::size_t sites, std::vector<Eigen::MatrixXd> values);

  std::size_t steps() const { return values_.size(); }
  std::size_t sources() const { return driven_.size(); }
  std::size_t sites() const { return sites_; }
  const std::vector<std::size_t>& driven() const { return driven_; }

  // m x L block for step k.
  const Eigen::MatrixXd& at(std::size_t step) const { return values_.at(step); }

  // Source laid out as a components x sites force matrix.
  Eigen::MatrixXd force(std::size_t step, std::size_t components) const;

  // Same values with the step order reversed.
  NoiseBlock reversed() const;

 private:
  std::vector<std::size_t> driven_;
  std::size_t sites_;
  std::vector<Eigen::MatrixXd> values_;
};

NoiseBlock sample_noise_block(const NoiseSpec& spec, const LatticeSpec& lattice, std::size_t steps,
                              double dt);

// Leapfrog with the block's source added to the force of each driven
// component. Returns steps + 1 states, initial included.
std::vector<FieldState> integrate_with_sources(const FieldState& state, const FieldModel& model,
                                               const NoiseBlock& noise, double dt);

// pi -> -pi
FieldState time_reversed(const FieldState& state);

// Integrates the momentum-reversed final state against the reversed block and
// flips momenta back; for an exact integrator this reproduces the initial state.
FieldState reverse_replay(const FieldState& final_state, const FieldModel& model,
                          const NoiseBlock& noise, double dt);

}  // namespace qlab::field

#endif  // QLAB_NOISE_HPP
