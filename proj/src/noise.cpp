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

#include "qlab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

namespace qlab::field {

NoiseSpec::NoiseSpec(std::vector<std::size_t> driven_, Eigen::MatrixXd sigma_, std::uint64_t seed_)
    : driven(std::move(driven_)), sigma(std::move(sigma_)), seed(seed_) {
  if (static_cast<std::size_t>(sigma.rows()) != driven.size() || sigma.rows() != sigma.cols()) {
    throw std::invalid_argument("NoiseSpec: sigma must be m x m with m = number of driven components");
  }
  if (std::set<std::size_t>(driven.begin(), driven.end()).size() != driven.size()) {
    throw std::invalid_argument("NoiseSpec: driven components must be distinct");
  }
}

NoiseSpec NoiseSpec::first_components(std::size_t m, Eigen::MatrixXd sigma, std::uint64_t seed) {
  std::vector<std::size_t> driven(m);
  for (std::size_t i = 0; i < m; ++i) driven[i] = i;
  return NoiseSpec(std::move(driven), std::move(sigma), seed);
}

NoiseBlock::NoiseBlock(std::vector<std::size_t> driven, std::size_t sites,
                       std::vector<Eigen::MatrixXd> values)
    : driven_(std::move(driven)), sites_(sites), values_(std::move(values)) {
  for (const auto& v : values_) {
    if (static_cast<std::size_t>(v.rows()) != driven_.size() || static_cast<std::size_t>(v.cols()) != sites_) {
      throw std::invalid_argument("NoiseBlock: block shape mismatch");
    }
  }
}

Eigen::MatrixXd NoiseBlock::force(std::size_t step, std::size_t components) const {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(components),
                                            static_cast<Eigen::Index>(sites_));
  const Eigen::MatrixXd& v = values_.at(step);
  for (std::size_t i = 0; i < driven_.size(); ++i) {
    if (driven_[i] >= components) throw std::invalid_argument("NoiseBlock: driven component out of range");
    f.row(static_cast<Eigen::Index>(driven_[i])) = v.row(static_cast<Eigen::Index>(i));
  }
  return f;
}

NoiseBlock NoiseBlock::reversed() const {
  std::vector<Eigen::MatrixXd> rev(values_.rbegin(), values_.rend());
  return NoiseBlock(driven_, sites_, std::move(rev));
}

NoiseBlock sample_noise_block(const NoiseSpec& spec, const LatticeSpec& lattice, std::size_t steps,
                              double dt) {
  if (steps == 0) throw std::invalid_argument("sample_noise_block: steps must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("sample_noise_block: dt must be positive");
  const auto m = static_cast<Eigen::Index>(spec.sources());
  const auto L = static_cast<Eigen::Index>(lattice.sites);

  Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(m, m);
  if (m > 0) {
    const double asym = (spec.sigma - spec.sigma.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12) throw std::invalid_argument("sample_noise_block: sigma is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(spec.sigma);
    const double scale = std::max(1.0, spec.sigma.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
      throw std::invalid_argument("sample_noise_block: sigma is not positive semidefinite");
    }
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor = eig.eigenvectors() * root.asDiagonal();
    // Exact zeros for a vanishing covariance, so the block is all zero.
    if (spec.sigma.cwiseAbs().maxCoeff() == 0.0) factor.setZero();
  }
  const double scale = 1.0 / std::sqrt(lattice.spacing * dt);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Eigen::MatrixXd> values;
  values.reserve(steps);
  Eigen::VectorXd z(m);
  for (std::size_t k = 0; k < steps; ++k) {
    Eigen::MatrixXd block(m, L);
    for (Eigen::Index x = 0; x < L; ++x) {
      for (Eigen::Index i = 0; i < m; ++i) z(i) = normal(rng);
      block.col(x) = scale * (factor * z);
    }
    values.push_back(std::move(block));
  }
  return NoiseBlock(spec.driven, lattice.sites, std::move(values));
}

std::vector<FieldState> integrate_with_sources(const FieldState& state, const FieldModel& model,
                                               const NoiseBlock& noise, double dt) {
  if (noise.sites() != model.lattice.sites) {
    throw std::invalid_argument("integrate_with_sources: noise block lattice mismatch");
  }
  std::vector<FieldState> trajectory;
  trajectory.reserve(noise.steps() + 1);
  trajectory.push_back(state);
  for (std::size_t k = 0; k < noise.steps(); ++k) {
    const Eigen::MatrixXd source = noise.force(k, model.components());
    trajectory.push_back(leapfrog_step(trajectory.back(), model, dt, &source, k));
  }
  return trajectory;
}

FieldState time_reversed(const FieldState& state) {
  FieldState r = state;
  r.pi = -r.pi;
  return r;
}

FieldState reverse_replay(const FieldState& final_state, const FieldModel& model,
                          const NoiseBlock& noise, double dt) {
  const NoiseBlock back = noise.reversed();
  FieldState s = time_reversed(final_state);
  for (std::size_t k = 0; k < back.steps(); ++k) {
    const Eigen::MatrixXd source = back.force(k, model.components());
    s = leapfrog_step(s, model, dt, &source, k);
  }
  return time_reversed(s);
}

}  // namespace qlab::field
