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

#include "qlab/mrf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qlab::mrf {

namespace {

struct Edge {
  std::size_t u, v;
  bool temporal;
};

std::uint64_t checked_power(std::size_t q, std::size_t n, const char* who) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (out > kEnumerationLimit / q) {
      throw std::length_error(std::string(who) + ": state space exceeds the enumeration bound 2^20");
    }
    out *= q;
  }
  return out;
}

void check_shape(std::size_t nx, std::size_t nt, std::size_t q) {
  if (nx == 0 || nt == 0) throw std::invalid_argument("lattice: nx and nt must be positive");
  if (q < 2) throw std::invalid_argument("lattice: need at least two states per site");
  // Configuration indices must fit in 64 bits.
  const double bits = static_cast<double>(nx * nt) * std::log2(static_cast<double>(q));
  if (bits > 62.0) throw std::invalid_argument("lattice: too many sites for a 64-bit configuration index");
}

void check_table(const Eigen::MatrixXd& t, std::size_t q, const char* what) {
  if (t.rows() != static_cast<Eigen::Index>(q) || t.cols() != static_cast<Eigen::Index>(q)) {
    throw std::invalid_argument(std::string("MRFModel: ") + what + " table must be q x q");
  }
  if (!t.allFinite() || (t.array() <= 0.0).any()) {
    throw std::invalid_argument(std::string("MRFModel: ") + what + " entries must be finite and positive");
  }
}

std::vector<Edge> lattice_edges(std::size_t nx, std::size_t nt) {
  std::vector<Edge> edges;
  for (std::size_t t = 0; t < nt; ++t) {
    if (nx == 2) {
      edges.push_back({t * nx, t * nx + 1, false});
    } else if (nx >= 3) {
      for (std::size_t x = 0; x < nx; ++x) edges.push_back({t * nx + x, t * nx + (x + 1) % nx, false});
    }
  }
  for (std::size_t t = 0; t + 1 < nt; ++t) {
    for (std::size_t x = 0; x < nx; ++x) edges.push_back({t * nx + x, (t + 1) * nx + x, true});
  }
  return edges;
}

bool symmetric(const Eigen::MatrixXd& t) { return t == t.transpose(); }

// prod psi over edges, from edge-pair counts. Symmetric tables fold (a, b)
// and (b, a) so the product is invariant under reversing edge orientation.
class WeightEvaluator {
 public:
  explicit WeightEvaluator(const MRFModel& m)
      : model_(m),
        edges_(lattice_edges(m.nx(), m.nt())),
        fold_spatial_(symmetric(m.spatial())),
        fold_temporal_(symmetric(m.temporal())),
        spatial_counts_(m.q() * m.q()),
        temporal_counts_(m.q() * m.q()) {}

  double weight(const std::vector<int>& s) {
    const std::size_t q = model_.q();
    std::fill(spatial_counts_.begin(), spatial_counts_.end(), 0);
    std::fill(temporal_counts_.begin(), temporal_counts_.end(), 0);
    for (const Edge& e : edges_) {
      const auto a = static_cast<std::size_t>(s[e.u]);
      const auto b = static_cast<std::size_t>(s[e.v]);
      const bool fold = e.temporal ? fold_temporal_ : fold_spatial_;
      const std::size_t k = fold ? std::min(a, b) * q + std::max(a, b) : a * q + b;
      ++(e.temporal ? temporal_counts_ : spatial_counts_)[k];
    }
    return product(model_.spatial(), spatial_counts_) * product(model_.temporal(), temporal_counts_);
  }

 private:
  double product(const Eigen::MatrixXd& table, const std::vector<int>& counts) const {
    const std::size_t q = model_.q();
    double w = 1.0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k] == 0) continue;
      w *= std::pow(table(static_cast<Eigen::Index>(k / q), static_cast<Eigen::Index>(k % q)), counts[k]);
    }
    return w;
  }

  const MRFModel& model_;
  std::vector<Edge> edges_;
  bool fold_spatial_, fold_temporal_;
  std::vector<int> spatial_counts_, temporal_counts_;
};

std::uint64_t reflect_index(std::uint64_t config, std::size_t nx, std::size_t nt, std::size_t q) {
  const std::vector<int> v = config_values(config, nx * nt, q);
  std::vector<int> r(v.size());
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t x = 0; x < nx; ++x) r[(nt - 1 - t) * nx + x] = v[t * nx + x];
  }
  return config_index(r, q);
}

void sort_entries(JointDistribution& j) {
  std::sort(j.entries.begin(), j.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

}  // namespace

// ---- models ----------------------------------------------------------------

MRFModel::MRFModel(std::size_t nx, std::size_t nt, std::size_t q, Eigen::MatrixXd edge_potential)
    : MRFModel(nx, nt, q, edge_potential, edge_potential) {}

MRFModel::MRFModel(std::size_t nx, std::size_t nt, std::size_t q, Eigen::MatrixXd spatial,
                   Eigen::MatrixXd temporal)
    : nx_(nx), nt_(nt), q_(q), spatial_(std::move(spatial)), temporal_(std::move(temporal)) {
  check_shape(nx, nt, q);
  check_table(spatial_, q, "spatial");
  check_table(temporal_, q, "temporal");
}

void MRFModel::check_slice(const std::vector<int>& values) const {
  if (values.size() != nx_) throw std::invalid_argument("MRFModel: boundary slice must have nx values");
  for (int v : values) {
    if (v < 0 || v >= static_cast<int>(q_)) throw std::invalid_argument("MRFModel: boundary value out of range");
  }
}

MRFModel& MRFModel::with_first_slice(std::vector<int> values) {
  check_slice(values);
  first_ = std::move(values);
  return *this;
}

MRFModel& MRFModel::with_last_slice(std::vector<int> values) {
  check_slice(values);
  last_ = std::move(values);
  return *this;
}

int MRFModel::clamp(std::size_t site) const {
  const std::size_t t = site / nx_;
  const std::size_t x = site % nx_;
  // With nt = 1 both clamps address the same slice; the last one wins.
  if (t == nt_ - 1 && last_) return (*last_)[x];
  if (t == 0 && first_) return (*first_)[x];
  return -1;
}

std::size_t MRFModel::free_sites() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < sites(); ++i) n += clamp(i) < 0 ? 1 : 0;
  return n;
}

MPModel::MPModel(std::size_t nx, std::size_t nt, std::size_t q, std::vector<double> transition,
                 std::vector<double> initial)
    : nx_(nx), nt_(nt), q_(q), transition_(std::move(transition)), initial_(std::move(initial)) {
  check_shape(nx, nt, q);
  if (transition_.size() != q * q * q * q) throw std::invalid_argument("MPModel: transition table needs q^4 entries");
  for (std::size_t row = 0; row < q * q * q; ++row) {
    double sum = 0.0;
    for (std::size_t s = 0; s < q; ++s) {
      const double p = transition_[row * q + s];
      if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("MPModel: negative or non-finite transition");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) throw std::invalid_argument("MPModel: transition row does not sum to 1");
  }
  const double slice_bits = static_cast<double>(nx) * std::log2(static_cast<double>(q));
  if (slice_bits > 24.0) throw std::invalid_argument("MPModel: initial slice distribution too large");
  std::size_t slice_states = 1;
  for (std::size_t x = 0; x < nx; ++x) slice_states *= q;
  if (initial_.size() != slice_states) throw std::invalid_argument("MPModel: initial distribution needs q^nx entries");
  double sum = 0.0;
  for (double p : initial_) {
    if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("MPModel: negative or non-finite initial weight");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) throw std::invalid_argument("MPModel: initial distribution does not sum to 1");
}

double MPModel::f(int s, int left, int centre, int right) const {
  const auto q = q_;
  return transition_[((static_cast<std::size_t>(left) * q + static_cast<std::size_t>(centre)) * q +
                      static_cast<std::size_t>(right)) * q + static_cast<std::size_t>(s)];
}

// ---- joints ----------------------------------------------------------------

double JointDistribution::probability(std::uint64_t config) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), config,
                                   [](const auto& e, std::uint64_t c) { return e.first < c; });
  return it != entries.end() && it->first == config ? it->second : 0.0;
}

double JointDistribution::total() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.second;
  return s;
}

std::uint64_t config_index(const std::vector<int>& values, std::size_t q) {
  std::uint64_t idx = 0;
  for (std::size_t i = values.size(); i-- > 0;) idx = idx * q + static_cast<std::uint64_t>(values[i]);
  return idx;
}

std::vector<int> config_values(std::uint64_t index, std::size_t sites, std::size_t q) {
  std::vector<int> v(sites);
  for (std::size_t i = 0; i < sites; ++i) {
    v[i] = static_cast<int>(index % q);
    index /= q;
  }
  return v;
}

// ---- forward process -------------------------------------------------------

MPSampler::MPSampler(const MPModel& model, std::uint64_t seed)
    : model_(&model),
      seed_(seed),
      rng_(seed),
      initial_(model.initial().begin(), model.initial().end()),
      scratch_(model.nx() * model.nt()) {}

void MPSampler::draw(std::vector<int>& values) {
  const std::size_t nx = model_->nx();
  const std::size_t q = model_->q();
  std::size_t slice = initial_(rng_);
  for (std::size_t x = 0; x < nx; ++x) {
    values[x] = static_cast<int>(slice % q);
    slice /= q;
  }
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (std::size_t t = 1; t < model_->nt(); ++t) {
    const int* prev = &values[(t - 1) * nx];
    for (std::size_t x = 0; x < nx; ++x) {
      const int l = prev[(x + nx - 1) % nx];
      const int c = prev[x];
      const int r = prev[(x + 1) % nx];
      const double u = uniform(rng_);
      double acc = 0.0;
      int chosen = static_cast<int>(q) - 1;
      for (std::size_t s = 0; s < q; ++s) {
        acc += model_->f(static_cast<int>(s), l, c, r);
        if (u < acc) {
          chosen = static_cast<int>(s);
          break;
        }
      }
      values[t * nx + x] = chosen;
    }
  }
}

LatticeSample MPSampler::next() {
  LatticeSample s;
  s.nx = model_->nx();
  s.nt = model_->nt();
  s.values.resize(s.nx * s.nt);
  draw(s.values);
  s.sampler = "mp_forward";
  s.seed = seed_;
  s.sweeps = 1;
  return s;
}

std::uint64_t MPSampler::next_index() {
  draw(scratch_);
  return config_index(scratch_, model_->q());
}

LatticeSample mp_sample(const MPModel& model, std::uint64_t seed) { return MPSampler(model, seed).next(); }

JointDistribution mp_exact(const MPModel& model) {
  const std::size_t nx = model.nx();
  const std::size_t nt = model.nt();
  const std::size_t q = model.q();
  const std::uint64_t total = checked_power(q, nx * nt, "mp_exact");
  std::uint64_t slice_states = 1;
  for (std::size_t x = 0; x < nx; ++x) slice_states *= q;

  JointDistribution j{nx, nt, q, {}, 1.0};
  for (std::uint64_t c = 0; c < total; ++c) {
    const std::vector<int> v = config_values(c, nx * nt, q);
    double p = model.initial()[c % slice_states];
    for (std::size_t t = 1; t < nt && p > 0.0; ++t) {
      const int* prev = &v[(t - 1) * nx];
      for (std::size_t x = 0; x < nx; ++x) {
        p *= model.f(v[t * nx + x], prev[(x + nx - 1) % nx], prev[x], prev[(x + 1) % nx]);
      }
    }
    if (p > 0.0) j.entries.emplace_back(c, p);
  }
  return j;
}

// ---- random field ----------------------------------------------------------

GibbsChain::GibbsChain(const MRFModel& model, std::uint64_t seed)
    : model_(&model), seed_(seed), rng_(seed), state_(model.sites()), incident_(model.sites()), weights_(model.q()) {
  for (const Edge& e : lattice_edges(model.nx(), model.nt())) {
    const Eigen::MatrixXd* table = e.temporal ? &model.temporal() : &model.spatial();
    incident_[e.u].push_back({e.v, true, table});
    incident_[e.v].push_back({e.u, false, table});
  }
  std::uniform_int_distribution<int> pick(0, static_cast<int>(model.q()) - 1);
  for (std::size_t i = 0; i < state_.size(); ++i) {
    const int c = model.clamp(i);
    state_[i] = c >= 0 ? c : pick(rng_);
  }
}

void GibbsChain::sweep() {
  const std::size_t q = model_->q();
  for (std::size_t i = 0; i < state_.size(); ++i) {
    if (model_->clamp(i) >= 0) continue;
    double total = 0.0;
    for (std::size_t s = 0; s < q; ++s) {
      double w = 1.0;
      for (const Incident& e : incident_[i]) {
        const auto o = static_cast<Eigen::Index>(state_[e.other]);
        const auto si = static_cast<Eigen::Index>(s);
        w *= e.site_first ? (*e.table)(si, o) : (*e.table)(o, si);
      }
      weights_[s] = w;
      total += w;
    }
    const double u = uniform_(rng_) * total;
    double acc = 0.0;
    int chosen = static_cast<int>(q) - 1;
    for (std::size_t s = 0; s < q; ++s) {
      acc += weights_[s];
      if (u < acc) {
        chosen = static_cast<int>(s);
        break;
      }
    }
    state_[i] = chosen;
  }
  ++sweeps_;
}

LatticeSample mrf_gibbs_sample(const MRFModel& model, std::size_t sweeps, std::size_t burn_in, std::uint64_t seed) {
  GibbsChain chain(model, seed);
  for (std::size_t k = 0; k < burn_in + sweeps; ++k) chain.sweep();
  LatticeSample s;
  s.nx = model.nx();
  s.nt = model.nt();
  s.values = chain.state();
  s.sampler = "mrf_gibbs";
  s.seed = seed;
  s.sweeps = chain.sweeps();
  return s;
}

JointDistribution mrf_exact(const MRFModel& model) {
  const std::size_t q = model.q();
  std::vector<std::size_t> free;
  std::vector<int> values(model.sites());
  for (std::size_t i = 0; i < model.sites(); ++i) {
    const int c = model.clamp(i);
    if (c < 0) free.push_back(i);
    values[i] = std::max(c, 0);
  }
  const std::uint64_t total = checked_power(q, free.size(), "mrf_exact");

  WeightEvaluator eval(model);
  JointDistribution j{model.nx(), model.nt(), q, {}, 0.0};
  j.entries.reserve(total);
  for (std::uint64_t k = 0; k < total; ++k) {
    std::uint64_t rest = k;
    for (std::size_t f : free) {
      values[f] = static_cast<int>(rest % q);
      rest /= q;
    }
    const double w = eval.weight(values);
    j.entries.emplace_back(config_index(values, q), w);
    j.partition_function += w;
  }
  for (auto& e : j.entries) e.second /= j.partition_function;
  sort_entries(j);
  return j;
}

JointDistribution Histogram::distribution() const {
  JointDistribution j{nx_, nt_, q_, {}, 1.0};
  j.entries.reserve(counts_.size());
  const double n = static_cast<double>(total_);
  for (const auto& [config, count] : counts_) j.entries.emplace_back(config, static_cast<double>(count) / n);
  sort_entries(j);
  return j;
}

double Histogram::site_marginal(std::size_t site, int value) const {
  std::uint64_t stride = 1;
  for (std::size_t i = 0; i < site; ++i) stride *= q_;
  std::size_t hits = 0;
  for (const auto& [config, count] : counts_) {
    if (static_cast<int>((config / stride) % q_) == value) hits += count;
  }
  return total_ == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total_);
}

double total_variation(const JointDistribution& a, const JointDistribution& b) {
  if (a.nx != b.nx || a.nt != b.nt || a.q != b.q) throw std::invalid_argument("total_variation: shape mismatch");
  double sum = 0.0;
  auto i = a.entries.begin();
  auto k = b.entries.begin();
  while (i != a.entries.end() || k != b.entries.end()) {
    if (k == b.entries.end() || (i != a.entries.end() && i->first < k->first)) {
      sum += std::abs(i->second);
      ++i;
    } else if (i == a.entries.end() || k->first < i->first) {
      sum += std::abs(k->second);
      ++k;
    } else {
      sum += std::abs(i->second - k->second);
      ++i;
      ++k;
    }
  }
  return 0.5 * sum;
}

JointDistribution time_reflected(const JointDistribution& joint) {
  JointDistribution r = joint;
  for (auto& e : r.entries) e.first = reflect_index(e.first, joint.nx, joint.nt, joint.q);
  sort_entries(r);
  return r;
}

Records ReflectionReport::records() const {
  return {{"tv_distance", tv_distance}, {"configurations", static_cast<double>(configurations)}};
}

namespace {

ReflectionReport reflection_of(const JointDistribution& joint) {
  ReflectionReport r;
  r.tv_distance = total_variation(joint, time_reflected(joint));
  r.configurations = joint.entries.size();
  return r;
}

}  // namespace

ReflectionReport time_reflection_report(const MRFModel& model) { return reflection_of(mrf_exact(model)); }
ReflectionReport time_reflection_report(const MPModel& model) { return reflection_of(mp_exact(model)); }

// ---- realizability search --------------------------------------------------

Records RealizabilityReport::records() const {
  Records r{{"min_tv", min_tv}, {"grid_points", static_cast<double>(grid_points)}};
  for (std::size_t k = 0; k < best_parameters.size(); ++k) {
    r.emplace_back("f1_c" + std::to_string(k / 3) + "_n" + std::to_string(k % 3), best_parameters[k]);
  }
  return r;
}

std::vector<double> symmetric_binary_transition(const std::vector<double>& parameters) {
  if (parameters.size() != 6) throw std::invalid_argument("symmetric_binary_transition: need 6 parameters");
  std::vector<double> table(16);
  for (int l = 0; l < 2; ++l) {
    for (int c = 0; c < 2; ++c) {
      for (int r = 0; r < 2; ++r) {
        const double p1 = parameters[static_cast<std::size_t>(c * 3 + l + r)];
        const std::size_t row = static_cast<std::size_t>((l * 2 + c) * 2 + r);
        table[row * 2 + 0] = 1.0 - p1;
        table[row * 2 + 1] = p1;
      }
    }
  }
  return table;
}

std::vector<double> first_slice_marginal(const JointDistribution& joint) {
  std::uint64_t slice_states = 1;
  for (std::size_t x = 0; x < joint.nx; ++x) slice_states *= joint.q;
  std::vector<double> m(slice_states, 0.0);
  for (const auto& [config, p] : joint.entries) m[config % slice_states] += p;
  return m;
}

RealizabilityReport mp_realizability_search(const MRFModel& model, const std::vector<double>& levels) {
  if (model.q() != 2) throw std::invalid_argument("mp_realizability_search: binary lattices only");
  if (levels.empty()) throw std::invalid_argument("mp_realizability_search: empty parameter grid");
  for (double v : levels) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("mp_realizability_search: grid levels must lie in (0, 1)");
  }
  const std::size_t nx = model.nx();
  const std::size_t nt = model.nt();
  const std::uint64_t total = checked_power(2, nx * nt, "mp_realizability_search");
  const std::uint64_t slice_states = std::uint64_t{1} << nx;

  const JointDistribution target = mrf_exact(model);
  const std::vector<double> initial = first_slice_marginal(target);

  // Per configuration: target probability, log initial weight, and counts
  // of (c, l + r, s) transitions.
  struct Row {
    double target, log_initial;
    std::array<int, 12> counts;
  };
  std::vector<Row> rows;
  double outside = 0.0;  // target mass on configs the MP cannot produce
  for (std::uint64_t c = 0; c < total; ++c) {
    const double init = initial[c % slice_states];
    const double p = target.probability(c);
    if (init <= 0.0) {
      outside += p;
      continue;
    }
    Row row{p, std::log(init), {}};
    const std::vector<int> v = config_values(c, nx * nt, 2);
    for (std::size_t t = 1; t < nt; ++t) {
      const int* prev = &v[(t - 1) * nx];
      for (std::size_t x = 0; x < nx; ++x) {
        const int n = prev[(x + nx - 1) % nx] + prev[(x + 1) % nx];
        ++row.counts[static_cast<std::size_t>((prev[x] * 3 + n) * 2 + v[t * nx + x])];
      }
    }
    rows.push_back(row);
  }

  RealizabilityReport report;
  report.min_tv = std::numeric_limits<double>::infinity();
  const std::size_t nl = levels.size();
  std::size_t grid = 1;
  for (int k = 0; k < 6; ++k) grid *= nl;
  report.grid_points = grid;

  std::vector<double> params(6);
  std::array<double, 12> logs{};
  for (std::size_t g = 0; g < grid; ++g) {
    std::size_t rest = g;
    for (std::size_t k = 0; k < 6; ++k) {
      params[k] = levels[rest % nl];
      rest /= nl;
      logs[2 * k] = std::log1p(-params[k]);
      logs[2 * k + 1] = std::log(params[k]);
    }
    double sum = outside;
    for (const Row& row : rows) {
      double lp = row.log_initial;
      for (std::size_t k = 0; k < 12; ++k) lp += row.counts[k] * logs[k];
      sum += std::abs(row.target - std::exp(lp));
    }
    const double tv = 0.5 * sum;
    if (tv < report.min_tv) {
      report.min_tv = tv;
      report.best_parameters = params;
    }
  }
  return report;
}

}  // namespace qlab::mrf
