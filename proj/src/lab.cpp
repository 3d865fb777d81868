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

#include "qlab/lab.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "qlab/field.hpp"
#include "qlab/hamiltonian.hpp"
#include "qlab/ladder.hpp"
#include "qlab/mrf.hpp"
#include "qlab/noise.hpp"
#include "qlab/pq_maps.hpp"
#include "qlab/reachability.hpp"

namespace qlab::lab {

using config::Config;
using config::ConfigError;
using fock::Complex;

namespace {

constexpr Comparator kLe = Comparator::less_equal;
constexpr Comparator kLt = Comparator::less;
constexpr Comparator kGt = Comparator::greater;
constexpr Comparator kGe = Comparator::greater_equal;
constexpr Comparator kEq = Comparator::equal;

struct Context {
  std::uint64_t seed;
  RunManifest& manifest;
  std::vector<CsvTable>& tables;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }

Eigen::VectorXcd random_alpha(std::size_t modes, double width, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd a(static_cast<Eigen::Index>(modes));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    a(i) = width * Complex(re, im);
  }
  return a;
}

// rho = G G^H / Tr with G Gaussian of the given rank, supported on the
// first `support` basis states.
fock::DensityMatrix random_density(std::size_t dim, std::size_t support, std::size_t rank, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  fock::Matrix g = fock::Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rank));
  for (Eigen::Index c = 0; c < g.cols(); ++c) {
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(support); ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(r, c) = Complex(re, im);
    }
  }
  fock::Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return fock::DensityMatrix(std::move(rho));
}

// ---- exp_energy_equivalence ------------------------------------------------

struct EnergyCase {
  double mass = 1.0;
  double coupling = 0.0;
  double amplitude = 0.0;
  std::size_t modes = 1;
  std::size_t n_max = 1;
  std::size_t ensembles = 1;

  static EnergyCase parse(const Config& c, const std::string& s, bool coupled) {
    EnergyCase e;
    e.mass = c.get_positive(s + ".mass");
    e.coupling = coupled ? c.get_positive(s + ".coupling") : 0.0;
    e.amplitude = c.get_double(s + ".amplitude");
    if (e.amplitude < 0.0) throw ConfigError("must be >= 0", 0, s + ".amplitude");
    e.modes = c.get_size(s + ".modes", 1, 8);
    e.n_max = c.get_size(s + ".n_max", 1, 200);
    e.ensembles = c.get_size(s + ".ensembles", 1, 10000);
    return e;
  }
};

struct EnergyParams {
  field::LatticeSpec lattice;
  EnergyCase free, phi4, sine_gordon;
  std::size_t phi4_refined_n_max = 0;
  double mean_occupation = 0.0;
  std::size_t recon_n_max = 0;
  std::vector<std::size_t> samples;
  std::size_t replicates = 1;
  std::size_t reference_samples = 0;
  double tol_free, tol_phi4, tol_refinement, tol_sine_gordon, tol_vacuum, tol_trace, tol_scaling;

  static EnergyParams parse(const Config& c) {
    EnergyParams p;
    p.lattice = field::LatticeSpec(c.get_size("lattice.sites", 2, 4096), c.get_positive("lattice.spacing"));
    p.free = EnergyCase::parse(c, "free", false);
    p.phi4 = EnergyCase::parse(c, "phi4", true);
    p.phi4_refined_n_max = c.get_size("phi4.n_max_refined", p.phi4.n_max + 1, 200);
    p.sine_gordon = EnergyCase::parse(c, "sine_gordon", true);
    p.mean_occupation = c.get_positive("reconstruction.mean_occupation");
    p.recon_n_max = c.get_size("reconstruction.n_max", 1, 400);
    p.samples = c.get_sizes("reconstruction.samples");
    if (p.samples.size() < 2) throw ConfigError("need at least two sample counts", 0, "reconstruction.samples");
    for (std::size_t n : p.samples) {
      if (n == 0) throw ConfigError("sample counts must be positive", 0, "reconstruction.samples");
    }
    p.replicates = c.get_size("reconstruction.replicates", 1, 1000);
    p.reference_samples = c.get_size("reconstruction.reference_samples", 1);
    if (std::find(p.samples.begin(), p.samples.end(), p.reference_samples) == p.samples.end()) {
      throw ConfigError("must be one of reconstruction.samples", 0, "reconstruction.reference_samples");
    }
    p.tol_free = c.get_double("tolerances.free_rel_err");
    p.tol_phi4 = c.get_double("tolerances.phi4_rel_err");
    p.tol_refinement = c.get_double("tolerances.phi4_refinement");
    p.tol_sine_gordon = c.get_double("tolerances.sine_gordon_rel_err");
    p.tol_vacuum = c.get_double("tolerances.vacuum_abs_err");
    p.tol_trace = c.get_double("tolerances.reconstruction_trace_distance");
    p.tol_scaling = c.get_double("tolerances.scaling_factor");
    return p;
  }
};

// Max rel_err over random point ensembles of one model; rows go to `table`.
double energy_case(const std::string& name, const EnergyCase& ec, std::size_t n_max, field::Potential potential,
                   const field::LatticeSpec& lattice, std::uint64_t seed, CsvTable& table) {
  const field::FieldModel model(lattice, {ec.mass}, potential, ec.coupling);
  const pq::ModeBasis basis = pq::ModeBasis::lowest_modes(lattice, {ec.mass}, ec.modes);
  const fock::FockSpec fock(ec.modes, n_max);
  const fock::OperatorMatrix hn = pq::normal_ordered_hamiltonian(fock, model, basis);
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t e = 0; e < ec.ensembles; ++e) {
    const field::FieldState s = pq::field_from_selected_alpha(random_alpha(ec.modes, ec.amplitude, rng), basis);
    const auto r = pq::check_energy_equivalence(pq::ClassicalEnsemble::point(s), model, basis, fock, hn);
    worst = std::max(worst, r.rel_err);
    table.add_row({name, fmt(n_max), fmt(e), fmt(r.lhs), fmt(r.rhs), fmt(r.rel_err), fmt(r.max_tail_mass)});
  }
  return worst;
}

void run(const EnergyParams& p, Context& ctx) {
  auto& m = ctx.manifest;
  CsvTable table{"energy_equivalence.csv", {"case", "n_max", "ensemble", "lhs", "rhs", "rel_err", "tail_mass"}, {}};

  const double free_err =
      energy_case("free", p.free, p.free.n_max, field::Potential::free, p.lattice, derive_seed(ctx.seed, 1), table);
  m.add_check("free_rel_err", free_err, kLe, p.tol_free);

  {
    const field::FieldModel model(p.lattice, {p.free.mass}, field::Potential::free);
    const pq::ModeBasis basis = pq::ModeBasis::lowest_modes(p.lattice, {p.free.mass}, p.free.modes);
    const fock::FockSpec fock(p.free.modes, p.free.n_max);
    const field::FieldState vacuum(1, p.lattice.sites);
    const auto r = pq::check_energy_equivalence(pq::ClassicalEnsemble::point(vacuum), model, basis, fock);
    table.add_row({"vacuum", fmt(p.free.n_max), "0", fmt(r.lhs), fmt(r.rhs), fmt(r.rel_err), fmt(r.max_tail_mass)});
    m.add_check("vacuum_abs_err", r.abs_err, kLe, p.tol_vacuum);
  }

  const std::uint64_t phi4_seed = derive_seed(ctx.seed, 2);
  const double phi4_err =
      energy_case("phi4", p.phi4, p.phi4.n_max, field::Potential::phi4, p.lattice, phi4_seed, table);
  const double phi4_refined =
      energy_case("phi4", p.phi4, p.phi4_refined_n_max, field::Potential::phi4, p.lattice, phi4_seed, table);
  m.add_check("phi4_rel_err", phi4_err, kLe, p.tol_phi4);
  m.add_check("phi4_refined_rel_err", phi4_refined, kLe, p.tol_phi4);
  // The residual must not grow with the cutoff.
  m.add_check("phi4_refinement_delta", phi4_refined - phi4_err, kLe, p.tol_refinement);

  const double sg_err = energy_case("sine_gordon", p.sine_gordon, p.sine_gordon.n_max, field::Potential::sine_gordon,
                                    p.lattice, derive_seed(ctx.seed, 3), table);
  m.add_check("sine_gordon_rel_err", sg_err, kLe, p.tol_sine_gordon);
  ctx.tables.push_back(std::move(table));

  // Thermal state from its Gaussian P ensemble on a single zero mode.
  const field::LatticeSpec single(2, 1.0);
  const pq::ModeBasis basis = pq::ModeBasis::lowest_modes(single, {1.0}, 1);
  const fock::FockSpec fock(1, p.recon_n_max);
  const double nbar = p.mean_occupation;
  fock::Matrix thermal = fock::Matrix::Zero(fock.levels(), fock.levels());
  for (std::size_t n = 0; n < fock.levels(); ++n) {
    thermal(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) =
        std::pow(nbar, static_cast<double>(n)) / std::pow(1.0 + nbar, static_cast<double>(n) + 1.0);
  }
  thermal /= thermal.trace().real();

  CsvTable recon{"p_reconstruction.csv", {"samples", "replicate", "trace_distance", "standard_error"}, {}};
  std::vector<double> rms;
  double reference_worst = 0.0;
  for (std::size_t k = 0; k < p.samples.size(); ++k) {
    double sq = 0.0;
    for (std::size_t r = 0; r < p.replicates; ++r) {
      pq::GaussianSampler g{field::FieldState(1, single.sites), Eigen::VectorXd::Constant(1, std::sqrt(nbar / 2.0)),
                            derive_seed(ctx.seed, 100 + k * p.replicates + r)};
      const auto rec = pq::p_reconstruct(pq::ClassicalEnsemble::sampler(g), basis, fock, p.samples[k]);
      const double d = fock::trace_distance(rec.rho.entries(), thermal);
      sq += d * d;
      if (p.samples[k] == p.reference_samples) reference_worst = std::max(reference_worst, d);
      recon.add_row({fmt(p.samples[k]), fmt(r), fmt(d), fmt(rec.standard_error)});
    }
    rms.push_back(std::sqrt(sq / static_cast<double>(p.replicates)));
    m.add_record("reconstruction.rms_trace_distance." + std::to_string(p.samples[k]), rms.back());
  }
  m.add_check("reconstruction_trace_distance", reference_worst, kLe, p.tol_trace);
  // rms * sqrt(N) is flat under 1/sqrt(N) scaling; compare with the first count.
  const double base = rms[0] * std::sqrt(static_cast<double>(p.samples[0]));
  double spread = 1.0;
  for (std::size_t k = 1; k < p.samples.size(); ++k) {
    const double ratio = rms[k] * std::sqrt(static_cast<double>(p.samples[k])) / base;
    spread = std::max({spread, ratio, 1.0 / ratio});
  }
  m.add_check("reconstruction_scaling_factor", spread, kLe, p.tol_scaling);
  ctx.tables.push_back(std::move(recon));
}

// ---- exp_reachability_gap --------------------------------------------------

struct ReachParams {
  double coupling;
  std::size_t n_max, n_max_coarse, free_n_max;
  pq::ReachabilityOptions options;
  double tol_coherent, tol_stability, tol_free_gap;

  static ReachParams parse(const Config& c) {
    ReachParams p;
    p.coupling = c.get_positive("quartic.coupling");
    p.n_max = c.get_size("quartic.n_max", 4, 400);
    p.n_max_coarse = c.get_size("quartic.n_max_coarse", 4, 400);
    p.free_n_max = c.get_size("free.n_max", 1, 400);
    p.options.restarts = c.get_size("optimizer.restarts", 1, 10000);
    p.options.start_width = c.get_positive("optimizer.start_width");
    p.options.max_iterations = c.get_size("optimizer.max_iterations", 1);
    p.options.gradient_tolerance = c.get_positive("optimizer.gradient_tolerance");
    p.tol_coherent = c.get_double("tolerances.coherent_min_abs");
    p.tol_stability = c.get_double("tolerances.gap_stability");
    p.tol_free_gap = c.get_double("tolerances.free_gap");
    return p;
  }
};

// a^H a + g :q^4: on one mode, q = (a + a^H)/sqrt(2).
fock::OperatorMatrix quartic_oscillator(std::size_t n_max, double g) {
  using fock::LadderPolynomial;
  LadderPolynomial h = LadderPolynomial::number(0);
  if (g != 0.0) h += Complex(g) * LadderPolynomial::quadrature_q(0).pow(4).ordered(fock::Ordering::normal);
  return fock::compress(fock::FockSpec(1, n_max), h, true);
}

void run(const ReachParams& p, Context& ctx) {
  auto& m = ctx.manifest;
  CsvTable table{"reachability.csv", {"case", "n_max", "e_quantum", "e_coherent_min", "gap", "converged"}, {}};
  auto solve = [&](const std::string& name, std::size_t n_max, double g, std::uint64_t stream) {
    pq::ReachabilityOptions opt = p.options;
    opt.seed = derive_seed(ctx.seed, stream);
    const auto r = pq::reachability_gap(quartic_oscillator(n_max, g), fock::FockSpec(1, n_max), opt);
    table.add_row({name, fmt(n_max), fmt(r.e_quantum), fmt(r.e_coherent_min), fmt(r.gap), r.converged ? "1" : "0"});
    m.add_records(name + "." + std::to_string(n_max), r.records());
    return r;
  };
  const auto fine = solve("quartic", p.n_max, p.coupling, 1);
  const auto coarse = solve("quartic", p.n_max_coarse, p.coupling, 1);
  const auto control = solve("free", p.free_n_max, 0.0, 2);

  m.add_check("quartic_coherent_min_abs", std::abs(fine.e_coherent_min), kLe, p.tol_coherent);
  m.add_check("quartic_e_quantum", fine.e_quantum, kLt, 0.0);
  m.add_check("quartic_gap", fine.gap, kGt, 0.0);
  m.add_check("quartic_optimizer_converged", fine.converged ? 1.0 : 0.0, kEq, 1.0);
  m.add_check("quartic_gap_stability", std::abs(fine.gap - coarse.gap), kLe, p.tol_stability);
  m.add_check("free_gap_abs", std::abs(control.gap), kLe, p.tol_free_gap);
  ctx.tables.push_back(std::move(table));
}

// ---- exp_q_gaussian --------------------------------------------------------

struct QParams {
  field::LatticeSpec lattice;
  double mass;
  std::vector<std::size_t> mode_counts, n_max;
  std::size_t probes;
  double base_amplitude, probe_width;
  std::size_t positivity_pairs, positivity_n_max, positivity_rank;
  double positivity_amplitude;
  std::size_t norm_states, norm_support, norm_n_max;
  double norm_radius, norm_step;
  double tol_rel_dev, tol_normalization;

  static QParams parse(const Config& c) {
    QParams p;
    p.lattice = field::LatticeSpec(c.get_size("lattice.sites", 2, 4096), c.get_positive("lattice.spacing"));
    p.mass = c.get_positive("lattice.mass");
    p.mode_counts = c.get_sizes("gaussian.mode_counts");
    p.n_max = c.get_sizes("gaussian.n_max");
    if (p.mode_counts.empty() || p.mode_counts.size() != p.n_max.size()) {
      throw ConfigError("needs one n_max per entry of gaussian.mode_counts", 0, "gaussian.n_max");
    }
    for (std::size_t k = 0; k < p.mode_counts.size(); ++k) {
      if (p.mode_counts[k] == 0 || p.mode_counts[k] > p.lattice.sites) {
        throw ConfigError("mode counts must lie in [1, lattice.sites]", 0, "gaussian.mode_counts");
      }
      if (p.n_max[k] == 0) throw ConfigError("cutoffs must be positive", 0, "gaussian.n_max");
    }
    p.probes = c.get_size("gaussian.probes", 1);
    p.base_amplitude = c.get_double("gaussian.base_amplitude");
    p.probe_width = c.get_positive("gaussian.probe_width");
    p.positivity_pairs = c.get_size("positivity.pairs", 1);
    p.positivity_n_max = c.get_size("positivity.n_max", 1, 200);
    p.positivity_rank = c.get_size("positivity.rank", 1, 201);
    p.positivity_amplitude = c.get_double("positivity.amplitude");
    p.norm_states = c.get_size("normalization.states", 1);
    p.norm_support = c.get_size("normalization.support_n_max", 0, 100);
    p.norm_n_max = c.get_size("normalization.n_max", p.norm_support, 400);
    p.norm_radius = c.get_positive("normalization.radius");
    p.norm_step = c.get_positive("normalization.grid_step");
    p.tol_rel_dev = c.get_double("tolerances.max_rel_dev");
    p.tol_normalization = c.get_double("tolerances.normalization");
    return p;
  }
};

void run(const QParams& p, Context& ctx) {
  auto& m = ctx.manifest;
  CsvTable table{"q_gaussian.csv", {"modes", "n_max", "max_rel_dev", "min_q", "max_tail_mass"}, {}};
  for (std::size_t k = 0; k < p.mode_counts.size(); ++k) {
    const std::size_t modes = p.mode_counts[k];
    const pq::ModeBasis basis = pq::ModeBasis::lowest_modes(p.lattice, {p.mass}, modes);
    const fock::FockSpec fock(modes, p.n_max[k]);
    std::mt19937_64 rng(derive_seed(ctx.seed, 10 + k));
    const field::FieldState base = pq::field_from_selected_alpha(random_alpha(modes, p.base_amplitude, rng), basis);
    const auto r = pq::q_gaussian_check(base, basis, fock, p.probes, derive_seed(ctx.seed, 20 + k), p.probe_width);
    table.add_row({fmt(modes), fmt(p.n_max[k]), fmt(r.max_rel_dev), fmt(r.min_q), fmt(r.max_tail_mass)});
    m.add_records("gaussian.M" + std::to_string(modes), r.records());
    m.add_check("gaussian_max_rel_dev_M" + std::to_string(modes), r.max_rel_dev, kLe, p.tol_rel_dev);
  }
  ctx.tables.push_back(std::move(table));

  // Positivity over random (rho, S) pairs on one mode.
  {
    const field::LatticeSpec single(2, 1.0);
    const pq::ModeBasis basis = pq::ModeBasis::lowest_modes(single, {1.0}, 1);
    const fock::FockSpec fock(1, p.positivity_n_max);
    std::mt19937_64 rng(derive_seed(ctx.seed, 30));
    double min_q = std::numeric_limits<double>::infinity();
    const std::size_t rank = std::min(p.positivity_rank, fock.dim());
    for (std::size_t i = 0; i < p.positivity_pairs; ++i) {
      const fock::DensityMatrix rho = random_density(fock.dim(), fock.dim(), rank, rng);
      const field::FieldState s = pq::field_from_selected_alpha(random_alpha(1, p.positivity_amplitude, rng), basis);
      min_q = std::min(min_q, pq::q_probability(rho, s, basis, fock));
    }
    m.add_check("positivity_min_q", min_q, kGe, 0.0);
  }

  // Grid integral of Q / pi over the disk |alpha| <= radius.
  {
    const field::LatticeSpec single(2, 1.0);
    const pq::ModeBasis basis = pq::ModeBasis::lowest_modes(single, {1.0}, 1);
    const fock::FockSpec fock(1, p.norm_n_max);
    std::mt19937_64 rng(derive_seed(ctx.seed, 31));
    const auto n = static_cast<long>(std::floor(p.norm_radius / p.norm_step));
    const double h = p.norm_step;
    CsvTable norm{"q_normalization.csv", {"state", "integral"}, {}};
    double worst = 0.0;
    for (std::size_t i = 0; i < p.norm_states; ++i) {
      const fock::DensityMatrix rho = random_density(fock.dim(), p.norm_support + 1, p.norm_support + 1, rng);
      double sum = 0.0;
      for (long x = -n; x <= n; ++x) {
        for (long y = -n; y <= n; ++y) {
          const Complex alpha(static_cast<double>(x) * h, static_cast<double>(y) * h);
          if (std::abs(alpha) > p.norm_radius) continue;
          const field::FieldState s = pq::field_from_selected_alpha(Eigen::VectorXcd::Constant(1, alpha), basis);
          sum += pq::q_probability(rho, s, basis, fock);
        }
      }
      const double integral = sum * h * h / std::numbers::pi;
      worst = std::max(worst, std::abs(integral - 1.0));
      norm.add_row({fmt(i), fmt(integral)});
    }
    m.add_check("normalization_max_abs_dev", worst, kLe, p.tol_normalization);
    ctx.tables.push_back(std::move(norm));
  }
}

// ---- exp_soliton_mass ------------------------------------------------------

struct SolitonParams {
  double mass, coupling, length, shift;
  std::vector<double> spacings, couplings;
  double tol_coarse, tol_fine, min_order, tol_scaling, tol_translation;

  static SolitonParams parse(const Config& c) {
    SolitonParams p;
    p.mass = c.get_positive("sine_gordon.mass");
    p.coupling = c.get_positive("sine_gordon.coupling");
    p.length = c.get_positive("sine_gordon.length");
    p.shift = c.get_double("sine_gordon.shift");
    p.spacings = c.get_doubles("sine_gordon.spacings");
    if (p.spacings.size() != 2 || !(p.spacings[0] > p.spacings[1]) || !(p.spacings[1] > 0.0)) {
      throw ConfigError("need [coarse, fine] with coarse > fine > 0", 0, "sine_gordon.spacings");
    }
    for (double a : p.spacings) {
      if (p.length / a > 1.0e6) throw ConfigError("lattice would exceed 10^6 sites", 0, "sine_gordon.spacings");
    }
    p.couplings = c.get_doubles("sine_gordon.coupling_scan");
    for (double l : p.couplings) {
      if (!(l > 0.0)) throw ConfigError("couplings must be positive", 0, "sine_gordon.coupling_scan");
    }
    p.tol_coarse = c.get_double("tolerances.coarse_rel_err");
    p.tol_fine = c.get_double("tolerances.fine_rel_err");
    p.min_order = c.get_double("tolerances.min_order");
    p.tol_scaling = c.get_double("tolerances.coupling_scaling");
    p.tol_translation = c.get_double("tolerances.translation");
    return p;
  }
};

double kink_energy(double mass, double coupling, double length, double spacing, double center) {
  const auto sites = static_cast<std::size_t>(std::llround(length / spacing));
  const field::FieldModel model(field::LatticeSpec(sites, spacing), {mass}, field::Potential::sine_gordon, coupling);
  return field::classical_energy(field::make_initial_state(field::Kink{center}, model), model);
}

void run(const SolitonParams& p, Context& ctx) {
  auto& m = ctx.manifest;
  const double exact = field::kink_mass(p.mass, p.coupling);
  CsvTable table{"soliton_mass.csv", {"spacing", "coupling", "center", "energy", "analytic", "rel_err"}, {}};
  std::vector<double> errs;
  for (double a : p.spacings) {
    const double e = kink_energy(p.mass, p.coupling, p.length, a, 0.0);
    errs.push_back(std::abs(e - exact) / exact);
    table.add_row({fmt(a), fmt(p.coupling), "0", fmt(e), fmt(exact), fmt(errs.back())});
  }
  m.add_check("coarse_rel_err", errs[0], kLe, p.tol_coarse);
  m.add_check("fine_rel_err", errs[1], kLe, p.tol_fine);
  const double order = std::log(errs[0] / errs[1]) / std::log(p.spacings[0] / p.spacings[1]);
  m.add_check("convergence_order", order, kGe, p.min_order);

  // E * lambda is independent of lambda for this normalization.
  const double a = p.spacings[1];
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double l : p.couplings) {
    const double e = kink_energy(p.mass, l, p.length, a, 0.0);
    lo = std::min(lo, e * l);
    hi = std::max(hi, e * l);
    table.add_row({fmt(a), fmt(l), "0", fmt(e), fmt(field::kink_mass(p.mass, l)), fmt(std::abs(e - field::kink_mass(p.mass, l)) / field::kink_mass(p.mass, l))});
  }
  if (!p.couplings.empty()) m.add_check("coupling_scaling_rel_spread", (hi - lo) / std::abs(hi), kLe, p.tol_scaling);

  const double centred = kink_energy(p.mass, p.coupling, p.length, a, 0.0);
  const double moved = kink_energy(p.mass, p.coupling, p.length, a, p.shift);
  table.add_row({fmt(a), fmt(p.coupling), fmt(p.shift), fmt(moved), fmt(exact), fmt(std::abs(moved - exact) / exact)});
  m.add_check("translation_rel_change", std::abs(moved - centred) / centred, kLe, p.tol_translation);
  ctx.tables.push_back(std::move(table));
}

// ---- exp_mrf_vs_mp ---------------------------------------------------------

struct MrfParams {
  std::size_t nx, nt;
  double initial_p1;
  std::vector<double> f1;
  std::size_t mp_samples;
  double coupling;
  std::size_t sweeps, burn_in;
  std::vector<int> first, last;
  std::size_t iid_samples, uniform_sweeps, clamp_sweeps;
  std::vector<double> levels;
  double tol_tv, tol_reflection, tol_marginal, tol_normalization;

  static std::vector<int> slice(const Config& c, const std::string& key, std::size_t nx) {
    std::vector<int> out;
    for (std::size_t v : c.get_sizes(key)) {
      if (v > 1) throw ConfigError("binary values only", 0, key);
      out.push_back(static_cast<int>(v));
    }
    if (out.size() != nx) throw ConfigError("needs lattice.nx entries", 0, key);
    return out;
  }

  static MrfParams parse(const Config& c) {
    MrfParams p;
    p.nx = c.get_size("lattice.nx", 1, 20);
    p.nt = c.get_size("lattice.nt", 2, 20);
    if (p.nx * p.nt > 20) throw ConfigError("nx * nt must not exceed 20 for enumeration", 0, "lattice.nt");
    p.initial_p1 = c.get_double("mp.initial_p1");
    if (!(p.initial_p1 > 0.0 && p.initial_p1 < 1.0)) throw ConfigError("must lie in (0, 1)", 0, "mp.initial_p1");
    p.f1 = c.get_doubles("mp.f1");
    if (p.f1.size() != 8) throw ConfigError("needs 8 entries f(1 | l, c, r), l most significant", 0, "mp.f1");
    for (double v : p.f1) {
      if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("probabilities must lie in [0, 1]", 0, "mp.f1");
    }
    p.mp_samples = c.get_size("mp.samples", 1);
    p.coupling = c.get_double("mrf.coupling");
    p.sweeps = c.get_size("mrf.sweeps", 1);
    p.burn_in = c.get_size("mrf.burn_in");
    p.first = slice(c, "boundary.first", p.nx);
    p.last = slice(c, "boundary.last", p.nx);
    p.iid_samples = c.get_size("uniform.iid_samples", 1);
    p.uniform_sweeps = c.get_size("uniform.gibbs_sweeps", 1);
    p.clamp_sweeps = c.get_size("boundary.sweeps", 1);
    p.levels = c.get_doubles("search.levels");
    if (p.levels.empty()) throw ConfigError("grid must not be empty", 0, "search.levels");
    for (double v : p.levels) {
      if (!(v > 0.0 && v < 1.0)) throw ConfigError("levels must lie in (0, 1)", 0, "search.levels");
    }
    p.tol_tv = c.get_double("tolerances.sampler_tv");
    p.tol_reflection = c.get_double("tolerances.reflection_tv");
    p.tol_marginal = c.get_double("tolerances.marginal_dev");
    p.tol_normalization = c.get_double("tolerances.normalization");
    return p;
  }
};

mrf::MPModel product_mp(std::size_t nx, std::size_t nt, double p1, const std::vector<double>& f1) {
  std::vector<double> initial(std::size_t{1} << nx);
  for (std::size_t k = 0; k < initial.size(); ++k) {
    double w = 1.0;
    for (std::size_t x = 0; x < nx; ++x) w *= ((k >> x) & 1U) ? p1 : 1.0 - p1;
    initial[k] = w;
  }
  std::vector<double> table(16);
  for (std::size_t row = 0; row < 8; ++row) {
    table[row * 2] = 1.0 - f1[row];
    table[row * 2 + 1] = f1[row];
  }
  return mrf::MPModel(nx, nt, 2, table, initial);
}

Eigen::MatrixXd attractive(double coupling) {
  Eigen::MatrixXd psi(2, 2);
  psi << std::exp(coupling), 1.0, 1.0, std::exp(coupling);
  return psi;
}

void add_joint_table(Context& ctx, const std::string& file, const mrf::JointDistribution& j) {
  CsvTable t{file, {"configuration_index", "probability"}, {}};
  for (const auto& [c, pr] : j.entries) t.add_row({std::to_string(c), fmt(pr)});
  ctx.tables.push_back(std::move(t));
}

void run(const MrfParams& p, Context& ctx) {
  auto& m = ctx.manifest;

  // Forward process against its enumeration.
  const mrf::MPModel mp = product_mp(p.nx, p.nt, p.initial_p1, p.f1);
  const mrf::JointDistribution mp_joint = mrf::mp_exact(mp);
  m.add_check("mp_exact_normalization", std::abs(mp_joint.total() - 1.0), kLe, p.tol_normalization);
  {
    mrf::MPSampler sampler(mp, derive_seed(ctx.seed, 1));
    mrf::Histogram h(p.nx, p.nt, 2);
    for (std::size_t s = 0; s < p.mp_samples; ++s) h.add(sampler.next_index());
    m.add_check("mp_sampler_tv", mrf::total_variation(h.distribution(), mp_joint), kLe, p.tol_tv);
  }
  add_joint_table(ctx, "mp_exact.csv", mp_joint);

  // Gibbs sampler against its enumeration.
  const mrf::MRFModel field(p.nx, p.nt, 2, attractive(p.coupling));
  const mrf::JointDistribution mrf_joint = mrf::mrf_exact(field);
  m.add_check("mrf_exact_normalization", std::abs(mrf_joint.total() - 1.0), kLe, p.tol_normalization);
  m.add_record("mrf.partition_function", mrf_joint.partition_function);
  {
    mrf::GibbsChain chain(field, derive_seed(ctx.seed, 2));
    for (std::size_t s = 0; s < p.burn_in; ++s) chain.sweep();
    mrf::Histogram h(p.nx, p.nt, 2);
    for (std::size_t s = 0; s < p.sweeps; ++s) {
      chain.sweep();
      h.add(chain.state_index());
    }
    m.add_check("mrf_sampler_tv", mrf::total_variation(h.distribution(), mrf_joint), kLe, p.tol_tv);
  }
  add_joint_table(ctx, "mrf_exact.csv", mrf_joint);

  // Uniform controls: i.i.d. forward process and psi = 1 field.
  {
    const mrf::MPModel iid = product_mp(p.nx, p.nt, 0.5, std::vector<double>(8, 0.5));
    mrf::MPSampler sampler(iid, derive_seed(ctx.seed, 3));
    mrf::Histogram h(p.nx, p.nt, 2);
    for (std::size_t s = 0; s < p.iid_samples; ++s) h.add(sampler.next_index());
    double dev = 0.0;
    for (std::size_t i = 0; i < p.nx * p.nt; ++i) dev = std::max(dev, std::abs(h.site_marginal(i, 1) - 0.5));
    m.add_check("iid_marginal_max_dev", dev, kLe, p.tol_marginal);

    const mrf::MRFModel flat(p.nx, p.nt, 2, Eigen::MatrixXd::Ones(2, 2));
    mrf::GibbsChain chain(flat, derive_seed(ctx.seed, 4));
    mrf::Histogram g(p.nx, p.nt, 2);
    for (std::size_t s = 0; s < p.uniform_sweeps; ++s) {
      chain.sweep();
      g.add(chain.state_index());
    }
    dev = 0.0;
    for (std::size_t i = 0; i < p.nx * p.nt; ++i) dev = std::max(dev, std::abs(g.site_marginal(i, 1) - 0.5));
    m.add_check("uniform_gibbs_marginal_max_dev", dev, kLe, p.tol_marginal);
  }

  // Clamping contract with the same pattern at both ends.
  {
    mrf::MRFModel clamped(p.nx, p.nt, 2, attractive(p.coupling));
    clamped.with_first_slice(p.first).with_last_slice(p.first);
    mrf::GibbsChain chain(clamped, derive_seed(ctx.seed, 5));
    std::size_t violations = 0;
    for (std::size_t s = 0; s < p.clamp_sweeps; ++s) {
      chain.sweep();
      for (std::size_t x = 0; x < p.nx; ++x) {
        violations += chain.state()[x] != p.first[x] ? 1 : 0;
        violations += chain.state()[(p.nt - 1) * p.nx + x] != p.first[x] ? 1 : 0;
      }
    }
    m.add_check("clamp_violations", static_cast<double>(violations), kEq, 0.0);
    m.add_check("symmetric_clamp_reflection_tv", mrf::time_reflection_report(clamped).tv_distance, kLe,
                p.tol_reflection);
  }

  // Time reflection.
  const auto sym = mrf::time_reflection_report(field);
  m.add_check("mrf_reflection_tv", sym.tv_distance, kLe, p.tol_reflection);
  mrf::MRFModel asym(p.nx, p.nt, 2, attractive(p.coupling));
  asym.with_first_slice(p.first).with_last_slice(p.last);
  const auto asym_report = mrf::time_reflection_report(asym);
  m.add_check("asymmetric_boundary_reflection_tv", asym_report.tv_distance, kGt, 0.0);
  const auto mp_report = mrf::time_reflection_report(mp);
  m.add_check("mp_reflection_tv", mp_report.tv_distance, kGt, 0.0);

  // No forward process on the grid reproduces the field's joint.
  const auto search = mrf::mp_realizability_search(field, p.levels);
  m.add_records("search", search.records());
  m.add_check("mp_realizability_min_tv", search.min_tv, kGt, 0.0);

  CsvTable summary{"mrf_summary.csv", {"quantity", "value"}, {}};
  summary.add_row({"mrf_reflection_tv", fmt(sym.tv_distance)});
  summary.add_row({"asymmetric_boundary_reflection_tv", fmt(asym_report.tv_distance)});
  summary.add_row({"mp_reflection_tv", fmt(mp_report.tv_distance)});
  summary.add_row({"mp_realizability_min_tv", fmt(search.min_tv)});
  ctx.tables.push_back(std::move(summary));
}

// ---- exp_noise_ensemble ----------------------------------------------------

struct NoiseParams {
  field::LatticeSpec lattice;
  double mass, sigma, dt;
  std::size_t steps, realizations, sample_every;
  double replay_mass, replay_amplitude;
  std::size_t replay_steps;
  double tol_r2, tol_slope, tol_mean_z, tol_replay;

  static NoiseParams parse(const Config& c) {
    NoiseParams p;
    p.lattice = field::LatticeSpec(c.get_size("lattice.sites", 2, 4096), c.get_positive("lattice.spacing"));
    p.mass = c.get_double("field.mass");
    if (p.mass != 0.0) throw ConfigError("the zero-mode diffusion check needs a massless field", 0, "field.mass");
    p.sigma = c.get_positive("noise.sigma");
    p.dt = c.get_positive("noise.dt");
    p.steps = c.get_size("noise.steps", 2);
    p.realizations = c.get_size("noise.realizations", 2);
    p.sample_every = c.get_size("noise.sample_every", 1);
    if (p.steps / p.sample_every < 2) throw ConfigError("need at least two sample times", 0, "noise.sample_every");
    p.replay_mass = c.get_double("replay.mass");
    if (p.replay_mass < 0.0) throw ConfigError("must be >= 0", 0, "replay.mass");
    p.replay_amplitude = c.get_double("replay.amplitude");
    p.replay_steps = c.get_size("replay.steps", 1);
    p.tol_r2 = c.get_double("tolerances.r2_min");
    p.tol_slope = c.get_double("tolerances.slope_rel_err");
    p.tol_mean_z = c.get_double("tolerances.mean_z");
    p.tol_replay = c.get_double("tolerances.replay_abs");
    return p;
  }
};

std::size_t bitwise_mismatches(const std::vector<field::FieldState>& a, const std::vector<field::FieldState>& b) {
  if (a.size() != b.size()) return std::numeric_limits<std::size_t>::max();
  std::size_t n = 0;
  auto cmp = [&n](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      n += std::bit_cast<std::uint64_t>(x.data()[i]) != std::bit_cast<std::uint64_t>(y.data()[i]) ? 1 : 0;
    }
  };
  for (std::size_t k = 0; k < a.size(); ++k) {
    cmp(a[k].phi, b[k].phi);
    cmp(a[k].pi, b[k].pi);
  }
  return n;
}

void run(const NoiseParams& p, Context& ctx) {
  auto& m = ctx.manifest;
  const field::FieldModel model(p.lattice, {p.mass}, field::Potential::free);

  // Zero source: identical to the deterministic integrator.
  {
    const field::FieldModel driven(p.lattice, {1.0}, field::Potential::free);
    const field::FieldState init =
        field::make_initial_state(field::GaussianRandom{p.replay_amplitude, derive_seed(ctx.seed, 1)}, driven);
    const auto spec = field::NoiseSpec::first_components(1, Eigen::MatrixXd::Zero(1, 1), derive_seed(ctx.seed, 2));
    const auto block = field::sample_noise_block(spec, p.lattice, p.steps, p.dt);
    const auto with = field::integrate_with_sources(init, driven, block, p.dt);
    const auto without = field::integrate(init, driven, p.dt, p.steps);
    m.add_check("zero_source_bitwise_mismatches", static_cast<double>(bitwise_mismatches(with, without)), kEq, 0.0);
  }

  // Zero-mode momentum diffusion: Var(mean pi)(t) = t sigma / (a L).
  const std::size_t samples = p.steps / p.sample_every + 1;
  Eigen::MatrixXd zero_mode(static_cast<Eigen::Index>(p.realizations), static_cast<Eigen::Index>(samples));
  const field::FieldState vacuum(1, p.lattice.sites);
  const Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(1, 1, p.sigma);
  for (std::size_t r = 0; r < p.realizations; ++r) {
    const auto spec = field::NoiseSpec::first_components(1, sigma, derive_seed(ctx.seed, 1000 + r));
    const auto block = field::sample_noise_block(spec, p.lattice, p.steps, p.dt);
    const auto traj = field::integrate_with_sources(vacuum, model, block, p.dt);
    for (std::size_t k = 0; k < samples; ++k) {
      zero_mode(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = traj[k * p.sample_every].pi.row(0).mean();
    }
  }
  const double n = static_cast<double>(p.realizations);
  const Eigen::RowVectorXd mean = zero_mode.colwise().mean();
  const Eigen::RowVectorXd var = (zero_mode.rowwise() - mean).array().square().colwise().sum() / (n - 1.0);
  Eigen::VectorXd t(static_cast<Eigen::Index>(samples));
  for (std::size_t k = 0; k < samples; ++k) t(static_cast<Eigen::Index>(k)) = static_cast<double>(k * p.sample_every) * p.dt;
  const double analytic_slope = p.sigma / (p.lattice.spacing * static_cast<double>(p.lattice.sites));

  const double tm = t.mean();
  const double vm = var.mean();
  const double sxy = ((t.array() - tm) * (var.transpose().array() - vm)).sum();
  const double sxx = (t.array() - tm).square().sum();
  const double slope = sxy / sxx;
  const double intercept = vm - slope * tm;
  const double ss_res = (var.transpose().array() - (intercept + slope * t.array())).square().sum();
  const double ss_tot = (var.transpose().array() - vm).square().sum();
  const double r2 = 1.0 - ss_res / ss_tot;
  m.add_record("zero_mode.slope", slope);
  m.add_record("zero_mode.analytic_slope", analytic_slope);
  m.add_record("zero_mode.intercept", intercept);
  m.add_check("zero_mode_variance_r2", r2, kGe, p.tol_r2);
  m.add_check("zero_mode_slope_rel_err", std::abs(slope - analytic_slope) / analytic_slope, kLe, p.tol_slope);

  const double t_end = t(t.size() - 1);
  const double standard_error = std::sqrt(analytic_slope * t_end / n);
  m.add_check("zero_mode_mean_z", std::abs(mean(mean.size() - 1)) / standard_error, kLe, p.tol_mean_z);

  CsvTable table{"zero_mode_variance.csv", {"time", "mean", "variance", "analytic_variance"}, {}};
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    table.add_row({fmt(t(k)), fmt(mean(k)), fmt(var(k)), fmt(analytic_slope * t(k))});
  }
  ctx.tables.push_back(std::move(table));

  // Reversed replay with a nonzero source.
  {
    const field::FieldModel driven(p.lattice, {p.replay_mass}, field::Potential::free);
    const field::FieldState init =
        field::make_initial_state(field::GaussianRandom{p.replay_amplitude, derive_seed(ctx.seed, 3)}, driven);
    const auto spec = field::NoiseSpec::first_components(1, sigma, derive_seed(ctx.seed, 4));
    const auto block = field::sample_noise_block(spec, p.lattice, p.replay_steps, p.dt);
    const auto traj = field::integrate_with_sources(init, driven, block, p.dt);
    const field::FieldState back = field::reverse_replay(traj.back(), driven, block, p.dt);
    double worst = 0.0;
    for (std::size_t j = 0; j < init.components(); ++j) {
      const auto row = static_cast<Eigen::Index>(j);
      const double err = std::max((back.phi.row(row) - init.phi.row(row)).cwiseAbs().maxCoeff(),
                                  (back.pi.row(row) - init.pi.row(row)).cwiseAbs().maxCoeff());
      m.add_record("replay.max_abs_err.component" + std::to_string(j), err);
      worst = std::max(worst, err);
    }
    m.add_check("replay_max_abs_err", worst, kLe, p.tol_replay);
  }
}

// ---- registry --------------------------------------------------------------

struct Experiment {
  ExperimentInfo info;
  std::function<void(const Config&)> parse;
  std::function<void(const Config&, Context&)> run;
};

template <class Params>
Experiment make_experiment(std::string id, std::string summary) {
  return {{std::move(id), std::move(summary)},
          [](const Config& c) { (void)Params::parse(c); },
          [](const Config& c, Context& ctx) { run(Params::parse(c), ctx); }};
}

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = {
      make_experiment<EnergyParams>("exp_energy_equivalence",
                                    "Tr(rho H_n) against classical ensemble energies; thermal P reconstruction"),
      make_experiment<ReachParams>("exp_reachability_gap",
                                   "coherent-state energy minimum against the exact ground energy"),
      make_experiment<QParams>("exp_q_gaussian", "Gaussian form, positivity and normalization of Q"),
      make_experiment<SolitonParams>("exp_soliton_mass", "lattice sine-Gordon kink energy against 8 m^3 / lambda"),
      make_experiment<MrfParams>("exp_mrf_vs_mp", "Gibbs and forward samplers against exact enumeration"),
      make_experiment<NoiseParams>("exp_noise_ensemble", "white-noise driven free field ensembles and replay"),
  };
  return r;
}

const Experiment& find_experiment(const std::string& id) {
  for (const auto& e : registry()) {
    if (e.info.id == id) return e;
  }
  std::string known;
  for (const auto& e : registry()) known += (known.empty() ? "" : ", ") + e.info.id;
  throw ConfigError("unknown experiment '" + id + "' (registered: " + known + ")");
}

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream).
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const std::vector<ExperimentInfo>& registered_experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

bool is_registered(const std::string& id) {
  for (const auto& e : registry()) {
    if (e.info.id == id) return true;
  }
  return false;
}

std::string experiment_id(const Config& config) {
  const std::string id = config.get_string("experiment.id");
  (void)find_experiment(id);
  return id;
}

void validate_config(const Config& config) {
  const Experiment& e = find_experiment(experiment_id(config));
  (void)config.get_u64("run.seed");
  try {
    e.parse(config);
  } catch (const ConfigError& err) {
    // Attach the line of the offending field when the parser only knew its name.
    if (err.line() == 0 && !err.field().empty() && config.has(err.field())) {
      const std::string msg = err.what();
      const std::string prefix = err.field() + ": ";
      throw ConfigError(msg.rfind(prefix, 0) == 0 ? msg.substr(prefix.size()) : msg,
                        config.entries().at(err.field()).line, err.field());
    }
    throw;
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  config.reject_unused();
}

RunResult run_experiment(const Config& config, std::optional<std::uint64_t> seed_override) {
  Config cfg = config;
  if (seed_override) {
    if (*seed_override > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw ConfigError("seed override must fit in a signed 64-bit integer", 0, "run.seed");
    }
    cfg.set("run.seed", static_cast<std::int64_t>(*seed_override));
  }
  validate_config(cfg);
  const std::string id = experiment_id(cfg);
  const std::uint64_t seed = cfg.get_u64("run.seed");

  RunResult result{RunManifest(id, cfg, seed), {}};
  Context ctx{seed, result.manifest, result.tables};
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();
  find_experiment(id).run(cfg, ctx);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  for (const auto& t : result.tables) result.manifest.add_file(t.file);
  result.manifest.set_timing(utc_timestamp(started), elapsed.count());
  return result;
}

void write_outputs(const RunResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (out_dir / name).string());
    out << text;
  };
  write("manifest.json", result.manifest.to_json(true));
  for (const auto& t : result.tables) write(t.file, t.render());
}

}  // namespace qlab::lab
