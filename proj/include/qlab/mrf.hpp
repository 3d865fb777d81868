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

#ifndef QLAB_MRF_HPP
#define QLAB_MRF_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qlab/report.hpp"

// Finite-state space-time lattices: a forward Markov process, a pairwise
// Markov random field, and exact enumeration of both.
//
// Sites are indexed t * nx + x. A configuration index is sum_i s_i q^i,
// so site 0 (x = 0, t = 0) is the least significant digit. Space is
// periodic (ring edges for nx >= 3, one edge for nx = 2), time is open.
namespace qlab::mrf {

/// Enumeration bound for exact joints.
inline constexpr std::uint64_t kEnumerationLimit = std::uint64_t{1} << 20;
inline constexpr double kRowSumTolerance = 1e-12;

class MRFModel {
 public:
  // One table for spatial and temporal edges.
  MRFModel(std::size_t nx, std::size_t nt, std::size_t q, Eigen::MatrixXd edge_potential);
  MRFModel(std::size_t nx, std::size_t nt, std::size_t q, Eigen::MatrixXd spatial, Eigen::MatrixXd temporal);

  // Clamp slice t = 0 or t = nt - 1 to fixed values (size nx).
  MRFModel& with_first_slice(std::vector<int> values);
  MRFModel& with_last_slice(std::vector<int> values);

  std::size_t nx() const { return nx_; }
  std::size_t nt() const { return nt_; }
  std::size_t q() const { return q_; }
  std::size_t sites() const { return nx_ * nt_; }
  const Eigen::MatrixXd& spatial() const { return spatial_; }
  const Eigen::MatrixXd& temporal() const { return temporal_; }
  const std::optional<std::vector<int>>& first_slice() const { return first_; }
  const std::optional<std::vector<int>>& last_slice() const { return last_; }

  // Clamped value of a site, or -1 if free.
  int clamp(std::size_t site) const;
  std::size_t free_sites() const;

 private:
  void check_slice(const std::vector<int>& values) const;

  std::size_t nx_, nt_, q_;
  Eigen::MatrixXd spatial_, temporal_;
  std::optional<std::vector<int>> first_, last_;
};

class MPModel {
 public:
  // transition[((l * q + c) * q + r) * q + s] = f(s | l, c, r);
  // initial[k] is the probability of slice configuration k = sum_x s_x q^x.
  MPModel(std::size_t nx, std::size_t nt, std::size_t q, std::vector<double> transition,
          std::vector<double> initial);

  std::size_t nx() const { return nx_; }
  std::size_t nt() const { return nt_; }
  std::size_t q() const { return q_; }
  double f(int s, int left, int centre, int right) const;
  const std::vector<double>& transition() const { return transition_; }
  const std::vector<double>& initial() const { return initial_; }

 private:
  std::size_t nx_, nt_, q_;
  std::vector<double> transition_, initial_;
};

struct LatticeSample {
  std::size_t nx = 0, nt = 0;
  std::vector<int> values;  // t * nx + x
  std::string sampler;
  std::uint64_t seed = 0;
  std::size_t sweeps = 0;

  int at(std::size_t x, std::size_t t) const { return values[t * nx + x]; }
};

// Sparse joint distribution; entries sorted by configuration index.
struct JointDistribution {
  std::size_t nx = 0, nt = 0, q = 0;
  std::vector<std::pair<std::uint64_t, double>> entries;
  // Unnormalized weight sum; 1 for MP joints and empirical histograms.
  double partition_function = 1.0;

  double probability(std::uint64_t config) const;
  double total() const;
};

std::uint64_t config_index(const std::vector<int>& values, std::size_t q);
std::vector<int> config_values(std::uint64_t index, std::size_t sites, std::size_t q);

/// Forward sampler; successive draws reuse one engine.
class MPSampler {
 public:
  MPSampler(const MPModel& model, std::uint64_t seed);
  LatticeSample next();
  std::uint64_t next_index();

 private:
  void draw(std::vector<int>& values);

  const MPModel* model_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::discrete_distribution<std::size_t> initial_;
  std::vector<int> scratch_;
};

LatticeSample mp_sample(const MPModel& model, std::uint64_t seed);
JointDistribution mp_exact(const MPModel& model);

/// Single-site heat-bath chain in raster order with clamped slices fixed.
class GibbsChain {
 public:
  GibbsChain(const MRFModel& model, std::uint64_t seed);
  void sweep();
  const std::vector<int>& state() const { return state_; }
  std::uint64_t state_index() const { return config_index(state_, model_->q()); }
  std::size_t sweeps() const { return sweeps_; }

 private:
  struct Incident {
    std::size_t other;
    bool site_first;  // site is the first argument of psi
    const Eigen::MatrixXd* table;
  };

  const MRFModel* model_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::vector<int> state_;
  std::vector<std::vector<Incident>> incident_;
  std::vector<double> weights_;
  std::size_t sweeps_ = 0;
};

LatticeSample mrf_gibbs_sample(const MRFModel& model, std::size_t sweeps, std::size_t burn_in, std::uint64_t seed);
JointDistribution mrf_exact(const MRFModel& model);

/// Accumulates configuration counts into an empirical joint.
class Histogram {
 public:
  Histogram(std::size_t nx, std::size_t nt, std::size_t q) : nx_(nx), nt_(nt), q_(q) {}
  void add(std::uint64_t config) { ++counts_[config]; ++total_; }
  std::size_t total() const { return total_; }
  JointDistribution distribution() const;
  // Fraction of samples with the given site equal to value.
  double site_marginal(std::size_t site, int value) const;

 private:
  std::size_t nx_, nt_, q_;
  std::unordered_map<std::uint64_t, std::size_t> counts_;
  std::size_t total_ = 0;
};

double total_variation(const JointDistribution& a, const JointDistribution& b);

// Joint of the time-reflected configurations t -> nt - 1 - t.
JointDistribution time_reflected(const JointDistribution& joint);

struct ReflectionReport {
  double tv_distance = 0.0;
  std::size_t configurations = 0;
  Records records() const;
};

ReflectionReport time_reflection_report(const MRFModel& model);
ReflectionReport time_reflection_report(const MPModel& model);

// Exhaustive search over forward processes with the MRF's exact t = 0
// marginal and binary transitions f(1 | l, c, r) that depend on l + r,
// every parameter drawn from `levels` (each in (0, 1)).
struct RealizabilityReport {
  double min_tv = 0.0;
  std::vector<double> best_parameters;  // f(1 | c, l + r) at index c * 3 + (l + r)
  std::size_t grid_points = 0;
  Records records() const;
};

RealizabilityReport mp_realizability_search(const MRFModel& model, const std::vector<double>& levels);

// Transition table of the l/r-symmetric binary family used by the search.
std::vector<double> symmetric_binary_transition(const std::vector<double>& parameters);

// Exact marginal of the t = 0 slice, indexed by slice configuration.
std::vector<double> first_slice_marginal(const JointDistribution& joint);

}  // namespace qlab::mrf

#endif  // QLAB_MRF_HPP
