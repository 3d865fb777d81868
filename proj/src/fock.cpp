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

#include "qlab/fock.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace qlab::fock {

namespace {

constexpr std::size_t kMaxDim = std::size_t{1} << 26;

}  // namespace

FockSpec::FockSpec(std::size_t modes, std::size_t n_max)
    : modes_(modes), n_max_(n_max), dim_(1) {
  if (modes == 0) throw std::invalid_argument("FockSpec: need at least one mode");
  if (n_max == 0) throw std::invalid_argument("FockSpec: n_max must be >= 1");
  for (std::size_t m = 0; m < modes; ++m) {
    if (dim_ > kMaxDim / levels()) {
      throw std::invalid_argument("FockSpec: dimension (n_max+1)^modes too large");
    }
    dim_ *= levels();
  }
}

std::vector<std::size_t> FockSpec::occupations(std::size_t index) const {
  if (index >= dim_) throw std::out_of_range("FockSpec: index out of range");
  std::vector<std::size_t> occ(modes_);
  for (std::size_t m = 0; m < modes_; ++m) {
    occ[m] = index % levels();
    index /= levels();
  }
  return occ;
}

std::size_t FockSpec::index(std::span<const std::size_t> occupations) const {
  if (occupations.size() != modes_) {
    throw std::invalid_argument("FockSpec: occupation vector has wrong length");
  }
  std::size_t idx = 0;
  for (std::size_t m = modes_; m-- > 0;) {
    if (occupations[m] > n_max_) throw std::out_of_range("FockSpec: occupation above n_max");
    idx = idx * levels() + occupations[m];
  }
  return idx;
}

std::size_t FockSpec::stride(std::size_t mode) const {
  if (mode >= modes_) throw std::out_of_range("FockSpec: mode out of range");
  std::size_t s = 1;
  for (std::size_t m = 0; m < mode; ++m) s *= levels();
  return s;
}

OperatorMatrix::OperatorMatrix(SparseMatrix entries, bool hermitian)
    : entries_(std::move(entries)), hermitian_(hermitian) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("OperatorMatrix: matrix must be square");
  }
  entries_.makeCompressed();
  if (hermitian_ && hermiticity_defect() > kHermitianTolerance) {
    throw std::invalid_argument("OperatorMatrix: tagged hermitian but A != A^H (defect " +
                                std::to_string(hermiticity_defect()) + ")");
  }
}

double OperatorMatrix::hermiticity_defect() const {
  const SparseMatrix diff = entries_ - SparseMatrix(entries_.adjoint());
  double worst = 0.0;
  for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

OperatorMatrix OperatorMatrix::shifted(double constant) const {
  SparseMatrix eye(entries_.rows(), entries_.cols());
  eye.setIdentity();
  return OperatorMatrix(entries_ + Complex(constant) * eye, hermitian_);
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(SparseMatrix(entries_.adjoint()), hermitian_);
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("OperatorMatrix: dimension mismatch");
  return OperatorMatrix(a.entries_ + b.entries_, a.hermitian_ && b.hermitian_);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("OperatorMatrix: dimension mismatch");
  return OperatorMatrix(a.entries_ - b.entries_, a.hermitian_ && b.hermitian_);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("OperatorMatrix: dimension mismatch");
  return OperatorMatrix(SparseMatrix(a.entries_ * b.entries_), false);
}

OperatorMatrix operator*(Complex scale, const OperatorMatrix& a) {
  return OperatorMatrix(scale * a.entries_, a.hermitian_ && scale.imag() == 0.0);
}

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw std::invalid_argument("DensityMatrix: matrix must be square and non-empty");
  }
  const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTolerance) {
    throw std::invalid_argument("DensityMatrix: not Hermitian (defect " + std::to_string(herm) + ")");
  }
  const Complex tr = entries_.trace();
  if (std::abs(tr - Complex(1.0)) > kTraceTolerance) {
    throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("DensityMatrix: eigenvalue check failed");
  }
  if (solver.eigenvalues().minCoeff() < kPsdFloor) {
    throw std::invalid_argument("DensityMatrix: not positive semidefinite (min eigenvalue " +
                                std::to_string(solver.eigenvalues().minCoeff()) + ")");
  }
}

DensityMatrix DensityMatrix::pure(const Vector& state) {
  const double norm = state.norm();
  if (norm == 0.0) throw std::invalid_argument("DensityMatrix::pure: zero vector");
  const Vector v = state / norm;
  Matrix rho = v * v.adjoint();
  // Outer products are Hermitian only up to rounding in the diagonal phase.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

OperatorMatrix build_annihilation(const FockSpec& spec, std::size_t mode) {
  if (mode >= spec.modes()) throw std::out_of_range("build_annihilation: mode out of range");
  const std::size_t stride = spec.stride(mode);
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(spec.dim());
  for (std::size_t col = 0; col < spec.dim(); ++col) {
    const std::size_t n = (col / stride) % spec.levels();
    if (n == 0) continue;
    triplets.emplace_back(static_cast<int>(col - stride), static_cast<int>(col),
                          Complex(std::sqrt(static_cast<double>(n))));
  }
  const auto d = static_cast<Eigen::Index>(spec.dim());
  SparseMatrix a(d, d);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return OperatorMatrix(std::move(a), false);
}

OperatorMatrix build_creation(const FockSpec& spec, std::size_t mode) {
  return build_annihilation(spec, mode).adjoint();
}

OperatorMatrix build_number(const FockSpec& spec, std::size_t mode) {
  if (mode >= spec.modes()) throw std::out_of_range("build_number: mode out of range");
  const std::size_t stride = spec.stride(mode);
  const auto d = static_cast<Eigen::Index>(spec.dim());
  SparseMatrix n(d, d);
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (std::size_t i = 0; i < spec.dim(); ++i) {
    const std::size_t occ = (i / stride) % spec.levels();
    if (occ) triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), Complex(double(occ)));
  }
  n.setFromTriplets(triplets.begin(), triplets.end());
  return OperatorMatrix(std::move(n), true);
}

OperatorMatrix identity(const FockSpec& spec) {
  const auto d = static_cast<Eigen::Index>(spec.dim());
  SparseMatrix eye(d, d);
  eye.setIdentity();
  return OperatorMatrix(std::move(eye), true);
}

Vector basis_state(const FockSpec& spec, std::span<const std::size_t> occupations) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(spec.dim()));
  v(static_cast<Eigen::Index>(spec.index(occupations))) = 1.0;
  return v;
}

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
  if (rho.dim() != op.dim()) throw std::invalid_argument("expectation: dimension mismatch");
  // Tr(rho A) = sum_ij rho_ji A_ij
  Complex acc = 0.0;
  const SparseMatrix& a = op.entries();
  for (Eigen::Index col = 0; col < a.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      acc += rho.entries()(it.col(), it.row()) * it.value();
    }
  }
  return acc;
}

Complex expectation(const Vector& psi, const OperatorMatrix& op) {
  if (static_cast<std::size_t>(psi.size()) != op.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return psi.dot(op.entries() * psi);
}

namespace {

void require_dense_size(const OperatorMatrix& op, const char* who) {
  if (op.dim() > kDenseEigenLimit) {
    throw std::invalid_argument(std::string(who) + ": dimension " + std::to_string(op.dim()) +
                                " exceeds dense eigensolver limit");
  }
  if (!op.hermitian()) throw std::invalid_argument(std::string(who) + ": operator not Hermitian");
}

}  // namespace

GroundState ground_state(const OperatorMatrix& op) {
  require_dense_size(op, "ground_state");
  const Matrix h = op.dense();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("ground_state: eigensolver failed");
  GroundState gs;
  gs.energy = solver.eigenvalues()(0);
  gs.vector = solver.eigenvectors().col(0).normalized();
  gs.residual = (h * gs.vector - gs.energy * gs.vector).norm();
  const double scale = std::max(1.0, h.norm());
  if (gs.residual > 1e-8 * scale) {
    throw std::runtime_error("ground_state: residual " + std::to_string(gs.residual) + " too large");
  }
  return gs;
}

Eigen::VectorXd spectrum(const OperatorMatrix& op) {
  require_dense_size(op, "spectrum");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op.dense(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");
  return solver.eigenvalues();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("trace_distance: dimension mismatch");
  }
  const Matrix diff = a - b;
  const Matrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace qlab::fock
