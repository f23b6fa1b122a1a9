#pragma once

#include <string>

#include "collision_norm/errors.hpp"
#include "collision_norm/linalg.hpp"
#include "collision_norm/matrix.hpp"
#include "collision_norm/riccati.hpp"
#include "collision_norm/state_space.hpp"

namespace cnorm {

struct LqrResult {
  Matrix gain;      // τ = gain·ξ
  Matrix riccati;   // stabilizing S
  double min_cost;  // tr(B_δᵀ S B_δ): Sobolev W plus ∫τᵀRτ at the optimum
};

/// State feedback on `control_channel` minimizing ∫ wᵀw + R·τ² dt, where w
/// are the model's [f, fdot] outputs and the initial condition is the
/// impulse on `impulse_channel`.
inline LqrResult lqr_state_feedback(const StateSpace& model, double r_weight,
                                    const std::string& control_channel = "tau",
                                    const std::string& impulse_channel = "delta",
                                    const SolverSettings& cfg = default_settings()) {
  if (!(r_weight > 0.0)) throw InvalidParams("LQR weight R must be positive");
  const StateSpace w = model.select_outputs({"f", "fdot"});
  const Matrix q = (w.c().transpose() * w.c()).symmetrized();
  const Matrix b_tau = model.input_column(control_channel);
  const Matrix r{{r_weight}};

  const Matrix s = solve_care(model.a(), b_tau, q, r, cfg);
  const Matrix gain = b_tau.transpose() * s * (-1.0 / r_weight);
  const Matrix b_delta = model.input_column(impulse_channel);
  const double cost = (b_delta.transpose() * s * b_delta)(0, 0);
  return {gain, s, cost};
}

/// LQR gain for the 4-state grounded robot, reported on the 5-element
/// state [θ, θ̇, q, q̇, x] with a zero entry for the static environment
/// position (uncontrollable from the motor torque).
inline LqrResult lqr_gain(const StateSpace& grounded_model, double r_weight,
                          const SolverSettings& cfg = default_settings()) {
  if (grounded_model.states() != 4)
    throw InvalidParams("lqr_gain expects the 4-state grounded model");
  LqrResult res = lqr_state_feedback(grounded_model, r_weight, "tau", "delta", cfg);
  Matrix padded(1, 5);
  padded.set_block(0, 0, res.gain);
  res.gain = padded;
  return res;
}

struct KalmanSteadyState {
  Matrix P;          // steady-state error covariance
  double var_x = 0;  // P at the environment-position state
};

/// Steady-state Kalman covariance for the emission model `est`:
///   A·P + P·Aᵀ − P·C_yᵀΣ_v⁻¹C_y·P + Σ_w = 0,
/// obtained from the dual control Riccati equation in (Aᵀ, C_yᵀ).
/// `x_state` is the index of the environment position.
inline KalmanSteadyState kalman_steady_covariance(
    const StateSpace& est, const Matrix& sigma_w, const Matrix& sigma_v,
    std::size_t x_state = 4, const SolverSettings& cfg = default_settings()) {
  const std::size_t n = est.states();
  if (sigma_w.rows() != n || sigma_w.cols() != n)
    throw DimensionMismatch("Sigma_w must be " + std::to_string(n) + "x" +
                            std::to_string(n));
  if (sigma_v.rows() != est.outputs() || !sigma_v.is_square())
    throw DimensionMismatch("Sigma_v must match the emission rows");
  if (x_state >= n) throw InvalidParams("x_state out of range");
  if (!cholesky(sigma_v.symmetrized(), cfg))
    throw InvalidParams("Sigma_v must be positive definite");

  const Matrix p = solve_care(est.a().transpose(), est.c().transpose(),
                              sigma_w.symmetrized(), sigma_v, cfg);
  return {p, p(x_state, x_state)};
}

/// A − P·C_yᵀΣ_v⁻¹C_y, the steady-state filter error dynamics.
inline Matrix filter_error_dynamics(const StateSpace& est, const Matrix& p,
                                    const Matrix& sigma_v) {
  const Matrix gain = p * est.c().transpose() * inverse(sigma_v);
  return est.a() - gain * est.c();
}

}  // namespace cnorm
