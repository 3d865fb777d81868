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

#include "qlab/reachability.hpp"

#include <cmath>
#include <memory>
#include <random>

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "qlab/pq_maps.hpp"

namespace qlab::pq {

namespace {

// A gradient this small after BFGS stops counts as a converged minimum.
constexpr double kAcceptedGradient = 1e-6;

struct Objective {
  const fock::OperatorMatrix* hn;
  const fock::FockSpec* fock;
  double fd_step;
};

Eigen::VectorXcd unpack(const gsl_vector* x) {
  const std::size_t modes = x->size / 2;
  Eigen::VectorXcd alpha(static_cast<Eigen::Index>(modes));
  for (std::size_t m = 0; m < modes; ++m) {
    alpha(static_cast<Eigen::Index>(m)) = Complex(gsl_vector_get(x, 2 * m), gsl_vector_get(x, 2 * m + 1));
  }
  return alpha;
}

double objective_f(const gsl_vector* x, void* params) {
  const auto* obj = static_cast<const Objective*>(params);
  return coherent_energy(*obj->hn, *obj->fock, unpack(x));
}

void objective_df(const gsl_vector* x, void* params, gsl_vector* grad) {
  const auto* obj = static_cast<const Objective*>(params);
  const double h = obj->fd_step;
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> probe(gsl_vector_alloc(x->size), gsl_vector_free);
  gsl_vector_memcpy(probe.get(), x);
  for (std::size_t i = 0; i < x->size; ++i) {
    const double xi = gsl_vector_get(x, i);
    gsl_vector_set(probe.get(), i, xi + h);
    const double up = objective_f(probe.get(), params);
    gsl_vector_set(probe.get(), i, xi - h);
    const double down = objective_f(probe.get(), params);
    gsl_vector_set(probe.get(), i, xi);
    gsl_vector_set(grad, i, (up - down) / (2.0 * h));
  }
}

void objective_fdf(const gsl_vector* x, void* params, double* f, gsl_vector* grad) {
  *f = objective_f(x, params);
  objective_df(x, params, grad);
}

bool lexicographically_less(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
  }
  return false;
}

struct LocalResult {
  Eigen::VectorXcd alpha;
  double energy = 0.0;
  double gradient_norm = 0.0;
};

LocalResult minimize_from(const Objective& obj, const Eigen::VectorXcd& start, const ReachabilityOptions& opt) {
  const std::size_t n = static_cast<std::size_t>(start.size()) * 2;
  gsl_multimin_function_fdf fn;
  fn.n = n;
  fn.f = objective_f;
  fn.df = objective_df;
  fn.fdf = objective_fdf;
  fn.params = const_cast<Objective*>(&obj);

  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(n), gsl_vector_free);
  for (Eigen::Index m = 0; m < start.size(); ++m) {
    gsl_vector_set(x.get(), 2 * static_cast<std::size_t>(m), start(m).real());
    gsl_vector_set(x.get(), 2 * static_cast<std::size_t>(m) + 1, start(m).imag());
  }
  std::unique_ptr<gsl_multimin_fdfminimizer, decltype(&gsl_multimin_fdfminimizer_free)> solver(
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n), gsl_multimin_fdfminimizer_free);
  gsl_multimin_fdfminimizer_set(solver.get(), &fn, x.get(), 0.1, 1e-4);

  for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
    const int status = gsl_multimin_fdfminimizer_iterate(solver.get());
    if (status != GSL_SUCCESS) break;  // GSL_ENOPROG: no further progress possible
    if (gsl_multimin_test_gradient(solver.get()->gradient, opt.gradient_tolerance) == GSL_SUCCESS) break;
  }
  LocalResult r;
  r.alpha = unpack(solver.get()->x);
  r.energy = solver.get()->f;
  r.gradient_norm = gsl_blas_dnrm2(solver.get()->gradient);
  return r;
}

}  // namespace

Records ReachabilityReport::records() const {
  return {{"e_quantum", e_quantum},
          {"e_coherent_min", e_coherent_min},
          {"gap", gap},
          {"converged", converged ? 1.0 : 0.0},
          {"restarts", static_cast<double>(restarts)}};
}

double coherent_energy(const fock::OperatorMatrix& hn, const fock::FockSpec& fock, const Eigen::VectorXcd& alpha) {
  const CoherentVector v = coherent_state(alpha, fock);
  return fock::expectation(v.entries, hn).real();
}

ReachabilityReport reachability_gap(const fock::OperatorMatrix& hn, const fock::FockSpec& fock,
                                    const ReachabilityOptions& options) {
  if (!hn.hermitian()) throw std::invalid_argument("reachability_gap: H_n must be Hermitian");
  if (hn.dim() != fock.dim()) throw std::invalid_argument("reachability_gap: dimension mismatch");
  if (options.restarts == 0) throw std::invalid_argument("reachability_gap: need at least one restart");

  ReachabilityReport report;
  report.e_quantum = fock::ground_state(hn).energy;
  report.restarts = options.restarts;

  gsl_error_handler_t* previous = gsl_set_error_handler_off();
  const Objective obj{&hn, &fock, options.fd_step};
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, options.start_width);
  bool have_best = false;
  LocalResult best;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    Eigen::VectorXcd start(static_cast<Eigen::Index>(fock.modes()));
    for (Eigen::Index m = 0; m < start.size(); ++m) {
      const double re = normal(rng);
      const double im = normal(rng);
      start(m) = Complex(re, im);
    }
    LocalResult local = minimize_from(obj, start, options);
    const bool better = !have_best || local.energy < best.energy - 1e-12 ||
                        (std::abs(local.energy - best.energy) <= 1e-12 &&
                         lexicographically_less(local.alpha, best.alpha));
    if (better) {
      best = std::move(local);
      have_best = true;
    }
  }
  gsl_set_error_handler(previous);

  report.e_coherent_min = best.energy;
  report.best_alpha = best.alpha;
  report.converged = best.gradient_norm <= kAcceptedGradient;
  report.gap = report.e_coherent_min - report.e_quantum;
  return report;
}

}  // namespace qlab::pq
