#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "collision_norm/errors.hpp"
#include "collision_norm/linalg.hpp"
#include "collision_norm/riccati.hpp"
#include "collision_norm/simulate.hpp"
#include "collision_norm/state_space.hpp"
#include "collision_norm/transfer_function.hpp"

namespace cnorm {

/// Squared H₂ norm from one input channel to all outputs,
/// trace(bᵀ·L_o·b) with AᵀL_o + L_oA + CᵀC = 0.
///
/// Throws NormDoesNotExist unless A is Hurwitz and the channel has no
/// direct feedthrough.
inline double h2_norm_sq(const StateSpace& ss, const std::string& input_channel,
                         const SolverSettings& cfg = default_settings()) {
  const std::size_t ch = ss.input_index(input_channel);
  for (std::size_t i = 0; i < ss.outputs(); ++i)
    if (ss.d()(i, ch) != 0.0)
      throw NormDoesNotExist("direct feedthrough from '" + input_channel + "'");
  if (!is_hurwitz(ss.a(), cfg))
    throw NormDoesNotExist("A is not Hurwitz");

  Matrix gram;
  try {
    gram = lyapunov_solve(ss.a(), ss.c().transpose() * ss.c(), cfg);
  } catch (const SingularMatrix& e) {
    throw NormDoesNotExist(std::string("observability Gramian: ") + e.what());
  }
  const Matrix b = ss.b().col(ch);
  const double w = (b.transpose() * gram * b)(0, 0);
  return std::max(w, 0.0);
}

struct SobolevNorm {
  double W = 0.0;      // ‖f‖₂² + ‖ḟ‖₂²
  double bound = 0.0;  // √W, bounds max|f(t)|
};

/// Sobolev W^{1,2} quantity of the `f` output's impulse response,
/// computed as the joint H₂ norm of the [f, fdot] output pair.
inline SobolevNorm sobolev_norm(const StateSpace& ss,
                                const std::string& input_channel,
                                const SolverSettings& cfg = default_settings()) {
  if (!ss.has_output("f")) throw UnknownChannel("model has no 'f' output");
  if (!ss.has_output("fdot"))
    throw MissingDerivativeOutput("model has no 'fdot' output");
  const double w = h2_norm_sq(ss.select_outputs({"f", "fdot"}), input_channel, cfg);
  return {w, std::sqrt(w)};
}

/// Appends fdot = C_f·A as an output. Valid (and D-free) when the force
/// output has relative degree at least two from `input_channel`, i.e.
/// C_f·b = 0.
inline StateSpace with_derivative_output(const StateSpace& ss,
                                         const std::string& input_channel) {
  const Matrix cf = ss.c().row_at(ss.output_index("f"));
  const Matrix b = ss.input_column(input_channel);
  const double cb = (cf * b)(0, 0);
  const double scale = cf.norm_inf() * b.norm_inf();
  if (std::abs(cb) > 1e-12 * std::max(scale, 1e-300) ||
      ss.d()(ss.output_index("f"), ss.input_index(input_channel)) != 0.0)
    throw NormDoesNotExist("force output has relative degree below two");
  return ss.with_output("fdot", cf * ss.a());
}

/// Realizes a force transfer function with outputs [f, fdot].
inline StateSpace sobolev_realization(const RationalTF& g) {
  if (relative_degree(g) < 2)
    throw NormDoesNotExist("relative degree " +
                           std::to_string(relative_degree(g)) + " < 2");
  return with_derivative_output(tf_to_ss(g, "delta", "f"), "delta");
}

namespace detail {

inline double trapezoid(const std::vector<double>& y, double dt) {
  if (y.size() < 2) return 0.0;
  double s = 0.5 * (y.front() + y.back());
  for (std::size_t k = 1; k + 1 < y.size(); ++k) s += y[k];
  return s * dt;
}

inline double lp_norm(const std::vector<double>& y, double dt, double p) {
  std::vector<double> v(y.size());
  std::transform(y.begin(), y.end(), v.begin(),
                 [p](double x) { return std::pow(std::abs(x), p); });
  return std::pow(trapezoid(v, dt), 1.0 / p);
}

}  // namespace detail

struct SignalSobolev {
  double W = 0.0;
  double peak = 0.0;
};

/// Time-domain Sobolev quantity: trapezoid(f²) + trapezoid(ḟ²) and max|f|.
inline SignalSobolev signal_sobolev(const ImpulseResponse& r) {
  std::vector<double> f2(r.samples_f.size()), d2(r.samples_fdot.size());
  std::transform(r.samples_f.begin(), r.samples_f.end(), f2.begin(),
                 [](double x) { return x * x; });
  std::transform(r.samples_fdot.begin(), r.samples_fdot.end(), d2.begin(),
                 [](double x) { return x * x; });
  return {detail::trapezoid(f2, r.dt) + detail::trapezoid(d2, r.dt), r.peak()};
}

/// Pointwise check of |f(t)|ᵖ ≤ p·‖f‖ₚ^{p−1}·‖ḟ‖ₚ over every sample,
/// with 1e-9 absolute slack. p must lie in [1, 8].
inline bool appendix_inequality_check(const ImpulseResponse& r, double p) {
  if (!(p >= 1.0 && p <= 8.0)) throw InvalidParams("p must lie in [1, 8]");
  const double nf = detail::lp_norm(r.samples_f, r.dt, p);
  const double nd = detail::lp_norm(r.samples_fdot, r.dt, p);
  const double rhs = p * std::pow(nf, p - 1.0) * nd;
  return std::all_of(r.samples_f.begin(), r.samples_f.end(), [&](double f) {
    return std::pow(std::abs(f), p) <= rhs + 1e-9;
  });
}

}  // namespace cnorm
