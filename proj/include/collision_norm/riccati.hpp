#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "collision_norm/errors.hpp"
#include "collision_norm/linalg.hpp"
#include "collision_norm/matrix.hpp"

namespace cnorm {

namespace detail {

// Column-major vec(X) for an n×n matrix.
inline Matrix vec(const Matrix& x) {
  const std::size_t n = x.rows();
  Matrix v(n * x.cols(), 1);
  for (std::size_t j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i) v(j * n + i, 0) = x(i, j);
  return v;
}

inline Matrix unvec(const Matrix& v, std::size_t n) {
  Matrix x(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) x(i, j) = v(j * n + i, 0);
  return x;
}

}  // namespace detail

/// ‖AᵀL + LA + Q‖_∞
inline double lyapunov_residual(const Matrix& a, const Matrix& l,
                                const Matrix& q) {
  return (a.transpose() * l + l * a + q).norm_inf();
}

/// Solves AᵀL + LA + Q = 0 through the Kronecker form
/// (I⊗Aᵀ + Aᵀ⊗I)·vec(L) = −vec(Q). O(n⁶), intended for n ≲ 10.
///
/// Throws SingularMatrix when A has eigenvalues λi + λj = 0, which includes
/// every A with an imaginary-axis mode.
inline Matrix lyapunov_solve(const Matrix& a, const Matrix& q,
                             const SolverSettings& cfg = default_settings()) {
  if (!a.is_square()) throw DimensionMismatch("lyapunov A must be square");
  if (q.rows() != a.rows() || q.cols() != a.cols())
    throw DimensionMismatch("lyapunov Q shape " + q.shape());
  const std::size_t n = a.rows();
  const Matrix at = a.transpose();
  const Matrix eye = Matrix::identity(n);
  const Matrix op = kron(eye, at) + kron(at, eye);
  const LuDecomposition lu(op, cfg);

  const Matrix rhs = -detail::vec(q);
  Matrix x = lu.solve(rhs);
  // One step of iterative refinement.
  x += lu.solve(rhs - op * x);
  return detail::unvec(x, n).symmetrized();
}

/// Lyapunov stability test: A is Hurwitz iff AᵀL + LA + I = 0 has a
/// positive definite solution.
inline bool is_hurwitz(const Matrix& a,
                       const SolverSettings& cfg = default_settings()) {
  if (!a.is_square()) throw DimensionMismatch("is_hurwitz of " + a.shape());
  if (!a.all_finite()) return false;
  try {
    const Matrix l = lyapunov_solve(a, Matrix::identity(a.rows()), cfg);
    if (!l.all_finite()) return false;
    return cholesky(l, cfg).has_value();
  } catch (const Error&) {
    return false;
  }
}

/// Residual of AᵀS + SA − S·B·R⁻¹·Bᵀ·S + Q and the scale it is judged
/// against, ‖Q‖ + ‖S‖²‖BR⁻¹Bᵀ‖.
struct CareResidual {
  double residual = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0 ? residual / scale : residual; }
};

inline CareResidual care_residual(const Matrix& a, const Matrix& b,
                                  const Matrix& q, const Matrix& r,
                                  const Matrix& s) {
  const Matrix g = b * lu_solve(r, b.transpose());
  const Matrix res = a.transpose() * s + s * a - s * g * s + q;
  const double sn = s.norm_inf();
  return {res.norm_inf(), q.norm_inf() + sn * sn * g.norm_inf()};
}

/// Stabilizing solution of the continuous algebraic Riccati equation
///   AᵀS + SA − S·B·R⁻¹·Bᵀ·S + Q = 0.
///
/// The matrix sign function of the Hamiltonian [[A, −G], [−Q, −Aᵀ]]
/// (G = BR⁻¹Bᵀ) isolates the stable invariant subspace, S is read off it by
/// least squares, and a single Newton–Kleinman step polishes the residual.
/// Throws NoStabilizingSolution when the iteration stalls or the closed loop
/// A − GS is not Hurwitz.
inline Matrix solve_care(const Matrix& a, const Matrix& b, const Matrix& q,
                         const Matrix& r,
                         const SolverSettings& cfg = default_settings()) {
  const std::size_t n = a.rows();
  if (!a.is_square() || b.rows() != n || q.rows() != n || q.cols() != n ||
      !r.is_square() || r.rows() != b.cols()) {
    throw DimensionMismatch("solve_care: A " + a.shape() + ", B " + b.shape() +
                            ", Q " + q.shape() + ", R " + r.shape());
  }
  if (!cholesky(r, cfg)) throw InvalidParams("R must be positive definite");
  (void)cholesky(q.symmetrized(), cfg);  // symmetry check only

  const Matrix rinv_bt = lu_solve(r, b.transpose(), cfg);
  const Matrix g = (b * rinv_bt).symmetrized();

  // Solve for S/γ, which satisfies the same equation with Q/γ and γ·G;
  // γ balances the two off-diagonal Hamiltonian blocks.
  const double qn = q.norm_inf();
  const double gn = g.norm_inf();
  const double gamma = (qn > 0.0 && gn > 0.0) ? std::sqrt(qn / gn) : 1.0;

  Matrix z(2 * n, 2 * n);
  z.set_block(0, 0, a);
  z.set_block(0, n, -(g * gamma));
  z.set_block(n, 0, -(q * (1.0 / gamma)));
  z.set_block(n, n, -a.transpose());

  // sign(D⁻¹ZD) = D⁻¹·sign(Z)·D; balancing keeps the iteration well
  // conditioned when states have very different scales.
  const std::vector<double> d = balance_scaling(z);
  for (std::size_t i = 0; i < 2 * n; ++i)
    for (std::size_t j = 0; j < 2 * n; ++j) z(i, j) *= d[j] / d[i];

  bool converged = false;
  try {
    for (int it = 0; it < cfg.sign_max_iter; ++it) {
      Matrix next = (z + inverse(z, cfg)) * 0.5;
      const double step = (next - z).norm_inf();
      const double size = z.norm_inf();
      z = std::move(next);
      if (step < cfg.sign_tol * size) {
        converged = true;
        break;
      }
    }
  } catch (const SingularMatrix& e) {
    throw NoStabilizingSolution(
        std::string("Hamiltonian has imaginary-axis eigenvalues: ") + e.what());
  }
  if (!converged)
    throw NoStabilizingSolution("sign iteration did not converge");

  for (std::size_t i = 0; i < 2 * n; ++i)
    for (std::size_t j = 0; j < 2 * n; ++j) z(i, j) *= d[i] / d[j];

  // Stable subspace: (sign(H) + I)·[I; S] = 0.
  Matrix lhs(2 * n, n);
  Matrix rhs(2 * n, n);
  const Matrix eye = Matrix::identity(n);
  lhs.set_block(0, 0, z.block(0, n, n, n));
  lhs.set_block(n, 0, z.block(n, n, n, n) + eye);
  rhs.set_block(0, 0, -(z.block(0, 0, n, n) + eye));
  rhs.set_block(n, 0, -z.block(n, 0, n, n));

  Matrix s;
  try {
    s = least_squares(lhs, rhs, cfg).symmetrized() * gamma;
  } catch (const SingularMatrix&) {
    throw NoStabilizingSolution("stable subspace is not a graph over [I; S]");
  }
  if (!s.all_finite()) throw NoStabilizingSolution("non-finite Riccati solution");

  // Newton–Kleinman polish: (A − BK)ᵀS + S(A − BK) + Q + KᵀRK = 0.
  const Matrix k = rinv_bt * s;
  const Matrix a_k = a - b * k;
  if (!is_hurwitz(a_k, cfg))
    throw NoStabilizingSolution("closed loop from sign iteration is unstable");
  const Matrix polished =
      lyapunov_solve(a_k, (q + k.transpose() * r * k).symmetrized(), cfg);

  if (!is_hurwitz(a - g * polished, cfg))
    throw NoStabilizingSolution("closed loop A - BR^-1B'S is not Hurwitz");
  return polished;
}

}  // namespace cnorm
