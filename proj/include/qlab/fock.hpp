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

#ifndef QLAB_FOCK_HPP
#define QLAB_FOCK_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qlab::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Largest dimension handed to the dense eigensolver.
inline constexpr std::size_t kDenseEigenLimit = 4096;

// Truncated multimode bosonic Fock space. Each mode holds occupations
// 0..n_max; the flat index places mode 0 in the fastest-varying digit.
class FockSpec {
 public:
  FockSpec(std::size_t modes, std::size_t n_max);

  std::size_t modes() const { return modes_; }
  std::size_t n_max() const { return n_max_; }
  std::size_t levels() const { return n_max_ + 1; }
  std::size_t dim() const { return dim_; }

  std::vector<std::size_t> occupations(std::size_t index) const;
  std::size_t index(std::span<const std::size_t> occupations) const;
  // Stride of one quantum in `mode` within the flat index.
  std::size_t stride(std::size_t mode) const;

  bool operator==(const FockSpec&) const = default;

 private:
  std::size_t modes_;
  std::size_t n_max_;
  std::size_t dim_;
};

// Square operator over a Fock space. The hermitian tag is checked on
// construction.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  OperatorMatrix(SparseMatrix entries, bool hermitian);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  bool hermitian() const { return hermitian_; }
  const SparseMatrix& entries() const { return entries_; }
  Matrix dense() const { return Matrix(entries_); }

  // Largest |A - A^H| entry.
  double hermiticity_defect() const;

  Vector apply(const Vector& v) const { return entries_ * v; }

  OperatorMatrix shifted(double constant) const;
  OperatorMatrix adjoint() const;

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(Complex scale, const OperatorMatrix& a);

 private:
  SparseMatrix entries_;
  bool hermitian_ = false;
};

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPsdFloor = -1e-10;

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positive semidefiniteness.
  explicit DensityMatrix(Matrix entries);

  static DensityMatrix pure(const Vector& state);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

OperatorMatrix build_annihilation(const FockSpec& spec, std::size_t mode);
OperatorMatrix build_creation(const FockSpec& spec, std::size_t mode);
OperatorMatrix build_number(const FockSpec& spec, std::size_t mode);
OperatorMatrix identity(const FockSpec& spec);

Vector basis_state(const FockSpec& spec, std::span<const std::size_t> occupations);

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& op);
// <psi|op|psi> for a normalized pure state.
Complex expectation(const Vector& psi, const OperatorMatrix& op);

struct GroundState {
  double energy;
  Vector vector;
  double residual;
};

// Smallest eigenpair via dense diagonalization; limited to kDenseEigenLimit.
GroundState ground_state(const OperatorMatrix& op);

// All eigenvalues in ascending order (dense; same size limit).
Eigen::VectorXd spectrum(const OperatorMatrix& op);

// 0.5 * sum |eigenvalues(a - b)|.
double trace_distance(const Matrix& a, const Matrix& b);

}  // namespace qlab::fock

#endif  // QLAB_FOCK_HPP
