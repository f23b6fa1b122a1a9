#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "collision_norm/errors.hpp"
#include "collision_norm/matrix.hpp"

namespace cnorm {

/// Tolerances shared by the dense solvers. The defaults are the values the
/// rest of the library is validated against.
struct SolverSettings {
  double pivot_tol = 1e-13;          // relative to ‖A‖_∞
  double symmetry_tol = 1e-10;       // relative, for cholesky input
  double sign_tol = 1e-12;           // relative step size of the sign iteration
  int sign_max_iter = 100;
  double lyapunov_residual_tol = 1e-8;
  double care_residual_tol = 1e-7;
  int pade_order = 6;
};

inline const SolverSettings& default_settings() {
  static const SolverSettings s{};
  return s;
}

/// LU factorization with partial pivoting, P·A = L·U packed in one matrix.
class LuDecomposition {
 public:
  explicit LuDecomposition(const Matrix& a,
                           const SolverSettings& cfg = default_settings())
      : lu_(a), perm_(a.rows()) {
    if (!a.is_square()) throw DimensionMismatch("LU of non-square " + a.shape());
    const std::size_t n = a.rows();
    const double scale = a.norm_inf();
    const double tiny = cfg.pivot_tol * scale;
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      double best = std::abs(lu_(k, k));
      for (std::size_t i = k + 1; i < n; ++i) {
        if (std::abs(lu_(i, k)) > best) {
          best = std::abs(lu_(i, k));
          p = i;
        }
      }
      if (best <= tiny || best == 0.0) {
        throw SingularMatrix("pivot " + std::to_string(best) +
                             " below threshold at column " + std::to_string(k));
      }
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
        std::swap(perm_[k], perm_[p]);
        sign_ = -sign_;
      }
      const double pivot = lu_(k, k);
      for (std::size_t i = k + 1; i < n; ++i) {
        const double m = lu_(i, k) / pivot;
        lu_(i, k) = m;
        if (m == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
      }
    }
  }

  Matrix solve(const Matrix& b) const {
    const std::size_t n = lu_.rows();
    if (b.rows() != n)
      throw DimensionMismatch("rhs " + b.shape() + " for LU of order " +
                              std::to_string(n));
    Matrix x(n, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
      std::vector<double> y(n);
      for (std::size_t i = 0; i < n; ++i) {
        double s = b(perm_[i], c);
        for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
        y[i] = s;
      }
      for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x(j, c);
        x(ii, c) = s / lu_(ii, ii);
      }
    }
    return x;
  }

  double determinant() const {
    double d = sign_;
    for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
    return d;
  }

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  double sign_ = 1.0;
};

/// Solves A·X = B by partial-pivoting LU.
/// Throws SingularMatrix when a pivot falls below pivot_tol·‖A‖_∞.
inline Matrix lu_solve(const Matrix& a, const Matrix& b,
                       const SolverSettings& cfg = default_settings()) {
  if (b.rows() != a.rows()) throw DimensionMismatch("lu_solve rhs rows");
  return LuDecomposition(a, cfg).solve(b);
}

inline Matrix inverse(const Matrix& a,
                      const SolverSettings& cfg = default_settings()) {
  return lu_solve(a, Matrix::identity(a.rows()), cfg);
}

/// Cholesky factor L (lower triangular, L·Lᵀ = A).
///
/// Returns nullopt when A is not positive definite; that is an answer, not
/// an error. Asymmetric input throws NotSymmetric.
inline std::optional<Matrix> cholesky(
    const Matrix& a, const SolverSettings& cfg = default_settings()) {
  if (!a.is_square()) throw DimensionMismatch("cholesky of " + a.shape());
  const std::size_t n = a.rows();
  const double scale = std::max(a.max_abs(), 1e-300);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > cfg.symmetry_tol * scale)
        throw NotSymmetric("cholesky input asymmetric at (" +
                           std::to_string(i) + "," + std::to_string(j) + ")");

  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return std::nullopt;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

/// Least-squares solution of min ‖M·X − R‖_F by Householder QR.
/// M must be tall with full column rank.
inline Matrix least_squares(const Matrix& m, const Matrix& r,
                            const SolverSettings& cfg = default_settings()) {
  const std::size_t rows = m.rows(), n = m.cols();
  if (rows < n) throw DimensionMismatch("least_squares needs a tall system");
  if (r.rows() != rows) throw DimensionMismatch("least_squares rhs rows");
  Matrix a = m;
  Matrix b = r;
  const double tiny = cfg.pivot_tol * std::max(m.norm_inf(), 1e-300);

  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < rows; ++i) norm += a(i, k) * a(i, k);
    norm = std::sqrt(norm);
    if (norm <= tiny) throw SingularMatrix("rank-deficient least squares");
    const double alpha = a(k, k) > 0 ? -norm : norm;
    std::vector<double> v(rows - k);
    for (std::size_t i = k; i < rows; ++i) v[i - k] = a(i, k);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double x : v) vnorm2 += x * x;
    if (vnorm2 == 0.0) continue;

    auto reflect = [&](Matrix& target, std::size_t col) {
      double dot = 0.0;
      for (std::size_t i = k; i < rows; ++i) dot += v[i - k] * target(i, col);
      const double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < rows; ++i) target(i, col) -= f * v[i - k];
    };
    for (std::size_t j = k; j < n; ++j) reflect(a, j);
    for (std::size_t j = 0; j < b.cols(); ++j) reflect(b, j);
  }

  Matrix x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = b(ii, c);
      for (std::size_t j = ii + 1; j < n; ++j) s -= a(ii, j) * x(j, c);
      x(ii, c) = s / a(ii, ii);
    }
  }
  return x;
}

/// Diagonal balancing (Parlett–Reinsch, powers of two, no permutation).
/// Returns d such that D⁻¹·M·D, D = diag(d), has comparable row and column
/// norms.
inline std::vector<double> balance_scaling(const Matrix& m) {
  if (!m.is_square()) throw DimensionMismatch("balance of " + m.shape());
  const std::size_t n = m.rows();
  std::vector<double> d(n, 1.0);
  Matrix b = m;
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(b(j, i));
        r += std::abs(b(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double total = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * total) {
        changed = true;
        d[i] *= f;
        for (std::size_t j = 0; j < n; ++j) {
          b(i, j) /= f;
          b(j, i) *= f;
        }
      }
    }
  }
  return d;
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant (order from settings, at least 6).
inline Matrix expm(const Matrix& a,
                   const SolverSettings& cfg = default_settings()) {
  if (!a.is_square()) throw DimensionMismatch("expm of " + a.shape());
  const std::size_t n = a.rows();
  const int q = std::max(cfg.pade_order, 6);

  const double norm = a.norm_inf();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Matrix x = a * std::ldexp(1.0, -squarings);

  // c_k = (2q-k)! q! / ((2q)! k! (q-k)!), built incrementally.
  Matrix num = Matrix::identity(n);
  Matrix den = Matrix::identity(n);
  Matrix power = Matrix::identity(n);
  double c = 1.0;
  for (int k = 1; k <= q; ++k) {
    c *= static_cast<double>(q - k + 1) /
         (static_cast<double>(k) * static_cast<double>(2 * q - k + 1));
    power = power * x;
    num += power * c;
    den += power * ((k % 2 == 0) ? c : -c);
  }
  Matrix e = lu_solve(den, num, cfg);
  for (int i = 0; i < squarings; ++i) e = e * e;
  return e;
}

}  // namespace cnorm
