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

#include "qlab/ladder.hpp"

#include <algorithm>
#include <cmath>

namespace qlab::fock {

LadderPolynomial LadderPolynomial::constant(Complex c) {
  LadderPolynomial p;
  p.add({}, c);
  return p;
}

LadderPolynomial LadderPolynomial::annihilation(std::size_t mode) {
  LadderPolynomial p;
  p.add({Ladder{mode, false}}, 1.0);
  return p;
}

LadderPolynomial LadderPolynomial::creation(std::size_t mode) {
  LadderPolynomial p;
  p.add({Ladder{mode, true}}, 1.0);
  return p;
}

LadderPolynomial LadderPolynomial::number(std::size_t mode) {
  LadderPolynomial p;
  p.add({Ladder{mode, true}, Ladder{mode, false}}, 1.0);
  return p;
}

LadderPolynomial LadderPolynomial::quadrature_q(std::size_t mode) {
  const double s = 1.0 / std::sqrt(2.0);
  LadderPolynomial p;
  p.add({Ladder{mode, false}}, s);
  p.add({Ladder{mode, true}}, s);
  return p;
}

LadderPolynomial LadderPolynomial::quadrature_p(std::size_t mode) {
  const double s = 1.0 / std::sqrt(2.0);
  LadderPolynomial p;
  p.add({Ladder{mode, true}}, Complex(0.0, s));
  p.add({Ladder{mode, false}}, Complex(0.0, -s));
  return p;
}

LadderPolynomial& LadderPolynomial::add(const Word& word, Complex coefficient) {
  if (coefficient == Complex(0.0)) return *this;
  auto [it, inserted] = terms_.try_emplace(word, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }
  return *this;
}

LadderPolynomial& LadderPolynomial::operator+=(const LadderPolynomial& other) {
  for (const auto& [w, c] : other.terms_) add(w, c);
  return *this;
}

LadderPolynomial& LadderPolynomial::operator-=(const LadderPolynomial& other) {
  for (const auto& [w, c] : other.terms_) add(w, -c);
  return *this;
}

LadderPolynomial& LadderPolynomial::operator*=(Complex scale) {
  if (scale == Complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) c *= scale;
  return *this;
}

LadderPolynomial operator*(const LadderPolynomial& a, const LadderPolynomial& b) {
  LadderPolynomial out;
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) {
      Word w;
      w.reserve(wa.size() + wb.size());
      w.insert(w.end(), wa.begin(), wa.end());
      w.insert(w.end(), wb.begin(), wb.end());
      out.add(w, ca * cb);
    }
  }
  return out;
}

LadderPolynomial LadderPolynomial::pow(unsigned k) const {
  LadderPolynomial out = constant(1.0);
  for (unsigned i = 0; i < k; ++i) out = out * *this;
  return out;
}

LadderPolynomial LadderPolynomial::ordered(Ordering ordering) const {
  LadderPolynomial out;
  for (const auto& [w, c] : terms_) {
    Word sorted = w;
    std::stable_sort(sorted.begin(), sorted.end(), [ordering](const Ladder& x, const Ladder& y) {
      if (x.creation != y.creation) {
        return ordering == Ordering::normal ? x.creation : y.creation;
      }
      return x.mode < y.mode;
    });
    out.add(sorted, c);
  }
  return out;
}

LadderPolynomial LadderPolynomial::adjoint() const {
  LadderPolynomial out;
  for (const auto& [w, c] : terms_) {
    Word r(w.rbegin(), w.rend());
    for (auto& op : r) op.creation = !op.creation;
    out.add(r, std::conj(c));
  }
  return out;
}

std::size_t LadderPolynomial::degree() const {
  std::size_t d = 0;
  for (const auto& [w, c] : terms_) d = std::max(d, w.size());
  return d;
}

std::size_t LadderPolynomial::max_mode() const {
  std::size_t m = 0;
  for (const auto& [w, c] : terms_) {
    for (const auto& op : w) m = std::max(m, op.mode);
  }
  return m;
}

LadderPolynomial& LadderPolynomial::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) { return std::abs(kv.second) <= tol; });
  return *this;
}

OperatorMatrix compress(const FockSpec& spec, const LadderPolynomial& poly, bool hermitian) {
  if (!poly.terms().empty() && poly.max_mode() >= spec.modes()) {
    throw std::out_of_range("compress: polynomial references a mode outside the Fock space");
  }
  const std::size_t modes = spec.modes();
  const std::size_t dim = spec.dim();
  std::vector<Eigen::Triplet<Complex>> triplets;
  std::vector<std::size_t> occ(modes);
  for (const auto& [word, coefficient] : poly.terms()) {
    for (std::size_t col = 0; col < dim; ++col) {
      std::size_t rest = col;
      for (std::size_t m = 0; m < modes; ++m) {
        occ[m] = rest % spec.levels();
        rest /= spec.levels();
      }
      double amp = 1.0;
      bool alive = true;
      for (auto it = word.rbegin(); it != word.rend(); ++it) {
        std::size_t& n = occ[it->mode];
        if (it->creation) {
          ++n;
          amp *= std::sqrt(static_cast<double>(n));
        } else {
          if (n == 0) {
            alive = false;
            break;
          }
          amp *= std::sqrt(static_cast<double>(n));
          --n;
        }
      }
      if (!alive) continue;
      std::size_t row = 0;
      bool inside = true;
      for (std::size_t m = modes; m-- > 0;) {
        if (occ[m] > spec.n_max()) {
          inside = false;
          break;
        }
        row = row * spec.levels() + occ[m];
      }
      if (!inside) continue;
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), coefficient * amp);
    }
  }
  const auto d = static_cast<Eigen::Index>(dim);
  SparseMatrix m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  if (hermitian) {
    // Coefficients of conjugate words agree only to rounding; symmetrize so
    // the Hermitian tag is exact.
    SparseMatrix sym = 0.5 * (m + SparseMatrix(m.adjoint()));
    return OperatorMatrix(std::move(sym), true);
  }
  return OperatorMatrix(std::move(m), false);
}

}  // namespace qlab::fock
