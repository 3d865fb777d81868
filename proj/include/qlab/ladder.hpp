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

#ifndef QLAB_LADDER_HPP
#define QLAB_LADDER_HPP

#include <compare>
#include <map>
#include <vector>

#include "qlab/fock.hpp"

namespace qlab::fock {

struct Ladder {
  std::size_t mode;
  bool creation;

  auto operator<=>(const Ladder&) const = default;
};

// Product of ladder operators, written left to right as it acts right to left.
using Word = std::vector<Ladder>;

enum class Ordering { normal, anti_normal };

// Polynomial in creation/annihilation operators. Multiplication concatenates
// words; no commutation relations are applied until `ordered` is called, and
// `ordered` itself only permutes (the ":...:" product, not an identity).
class LadderPolynomial {
 public:
  LadderPolynomial() = default;

  static LadderPolynomial constant(Complex c);
  static LadderPolynomial annihilation(std::size_t mode);
  static LadderPolynomial creation(std::size_t mode);
  static LadderPolynomial number(std::size_t mode);
  // q = (a + a^H)/sqrt(2), p = i(a^H - a)/sqrt(2)
  static LadderPolynomial quadrature_q(std::size_t mode);
  static LadderPolynomial quadrature_p(std::size_t mode);

  LadderPolynomial& add(const Word& word, Complex coefficient);
  LadderPolynomial& operator+=(const LadderPolynomial& other);
  LadderPolynomial& operator-=(const LadderPolynomial& other);
  LadderPolynomial& operator*=(Complex scale);

  friend LadderPolynomial operator+(LadderPolynomial a, const LadderPolynomial& b) { return a += b; }
  friend LadderPolynomial operator-(LadderPolynomial a, const LadderPolynomial& b) { return a -= b; }
  friend LadderPolynomial operator*(Complex s, LadderPolynomial a) { return a *= s; }
  friend LadderPolynomial operator*(const LadderPolynomial& a, const LadderPolynomial& b);

  LadderPolynomial pow(unsigned k) const;

  // Rearranges every word so that creators sit left of annihilators
  // (normal) or the reverse (anti_normal), dropping commutators.
  LadderPolynomial ordered(Ordering ordering) const;

  // Hermitian conjugate.
  LadderPolynomial adjoint() const;

  std::size_t degree() const;
  std::size_t max_mode() const;
  const std::map<Word, Complex>& terms() const { return terms_; }

  // Drops coefficients with magnitude <= tol.
  LadderPolynomial& prune(double tol = 0.0);

 private:
  std::map<Word, Complex> terms_;
};

// Matrix of the infinite-space operator compressed onto the truncated Fock
// space, P A P. Intermediate occupations may exceed n_max; only the final
// state is restricted. For normal-ordered words this coincides with the
// product of truncated ladder matrices.
OperatorMatrix compress(const FockSpec& spec, const LadderPolynomial& poly, bool hermitian);

}  // namespace qlab::fock

#endif  // QLAB_LADDER_HPP
