#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "collision_norm/collision_norm.hpp"

namespace cnorm::testing {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline Matrix random_matrix(Lcg& rng, std::size_t r, std::size_t c,
                            double lo = -1.0, double hi = 1.0) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

/// Strictly diagonally dominant with negative diagonal, hence Hurwitz by
/// Gershgorin.
inline Matrix random_hurwitz(Lcg& rng, std::size_t n) {
  Matrix a = random_matrix(rng, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += std::abs(a(i, j));
    a(i, i) = -(off + rng.uniform(0.1, 2.0));
  }
  return a;
}

/// M·Mᵀ + shift·I.
inline Matrix random_spd(Lcg& rng, std::size_t n, double shift) {
  const Matrix m = random_matrix(rng, n, n);
  return (m * m.transpose() + Matrix::identity(n) * shift).symmetrized();
}

}  // namespace cnorm::testing
