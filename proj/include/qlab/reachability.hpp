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

#ifndef QLAB_REACHABILITY_HPP
#define QLAB_REACHABILITY_HPP

#include <cstdint>

#include "qlab/fock.hpp"
#include "qlab/report.hpp"

namespace qlab::pq {

struct ReachabilityOptions {
  std::size_t restarts = 16;
  std::uint64_t seed = 0;
  // Central-difference step for the gradient.
  double fd_step = 1e-5;
  // Starting points are drawn with Re, Im ~ N(0, start_width^2).
  double start_width = 1.0;
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-9;
};

struct ReachabilityReport {
  double e_quantum = 0.0;
  double e_coherent_min = 0.0;
  double gap = 0.0;
  Eigen::VectorXcd best_alpha;
  // False when no restart met the gradient tolerance; the best point found
  // is still reported.
  bool converged = false;
  std::size_t restarts = 0;

  Records records() const;
};

// <alpha| H |alpha> with the truncated, normalized coherent state.
double coherent_energy(const fock::OperatorMatrix& hn, const fock::FockSpec& fock, const Eigen::VectorXcd& alpha);

// Ground energy by exact diagonalization against the lowest coherent-state
// energy found by multi-start BFGS over Re/Im alpha. Mixtures of coherent
// states cannot go below the best pure one, so the coherent minimum is the
// lowest energy any nonnegative P distribution reaches.
ReachabilityReport reachability_gap(const fock::OperatorMatrix& hn, const fock::FockSpec& fock,
                                    const ReachabilityOptions& options = {});

}  // namespace qlab::pq

#endif  // QLAB_REACHABILITY_HPP
