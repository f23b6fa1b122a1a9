#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "collision_norm/errors.hpp"
#include "collision_norm/matrix.hpp"
#include "collision_norm/norms.hpp"
#include "collision_norm/riccati.hpp"
#include "collision_norm/state_space.hpp"
#include "collision_norm/synthesis.hpp"
#include "collision_norm/transfer_function.hpp"

namespace cnorm {

/// Two-inertia flexible-joint robot: motor inertia J with damping B to
/// ground, joint spring K_jt, link inertia I with damping V, interface
/// spring K_e. Rotational units (kg·m², N·m·s/rad, N·m/rad).
struct RobotParams {
  double J = 3.19;
  double B = 24.3;
  double K_jt = 10e3;
  double I = 4.5;
  double V = 20.3;
  double K_e = 30e3;

  /// Robot values of the LWR-like joint, interface stiffness 30 kN·m/rad.
  static RobotParams nominal() { return {}; }

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidParams(std::string(name) + " must be positive and finite");
    };
    auto non_negative = [](double v, const char* name) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InvalidParams(std::string(name) + " must be non-negative and finite");
    };
    positive(J, "J");
    non_negative(B, "B");
    positive(K_jt, "K_jt");
    positive(I, "I");
    non_negative(V, "V");
    positive(K_e, "K_e");
  }
};

/// Pure stiffness to ground. When K_env is set it acts in series with the
/// robot's interface spring.
struct Grounded {
  std::optional<double> K_env;
};

/// Environment inertia I_h with damping B_h, driven by the interface force.
struct DampedInertia {
  double B_h = 0.0;
  double I_h = 1.0;
};

using EnvironmentSpec = std::variant<Grounded, DampedInertia>;

struct NoControl {};
/// Motor dynamics removed (J = B = 0): the unloaded joint spring carries no
/// torque, so only the link and interface remain.
struct NoMotor {};
/// Joint-torque PD loop τ_m = −(K_p + K_d·s)·K_jt·(θ − q).
struct PDTorque {
  double K_p = 1.5;
  double K_d = 0.2;
};
/// τ_m = gain·ξ on the model's own state vector.
struct StateFeedback {
  Matrix gain;
};
struct Lqr {
  double R = 5.0;
};

using ControllerSpec = std::variant<NoControl, NoMotor, PDTorque, StateFeedback, Lqr>;

inline std::string controller_name(const ControllerSpec& c) {
  struct Visitor {
    std::string operator()(const NoControl&) const { return "nocontrol"; }
    std::string operator()(const NoMotor&) const { return "nomotor"; }
    std::string operator()(const PDTorque&) const { return "pd"; }
    std::string operator()(const StateFeedback&) const { return "statefeedback"; }
    std::string operator()(const Lqr&) const { return "lqr"; }
  };
  return std::visit(Visitor{}, c);
}

/// K_jt·[K_p, K_d, −K_p, −K_d] on [θ, θ̇, q, q̇]. The torque loop applies it
/// as negative feedback, τ_m = −K_pd·ξ.
inline Matrix pd_torque_gain(const RobotParams& p, const PDTorque& pd) {
  return Matrix{{pd.K_p * p.K_jt, pd.K_d * p.K_jt, -pd.K_p * p.K_jt,
                 -pd.K_d * p.K_jt}};
}

namespace detail {

inline double series_stiffness(double k_e, const Grounded& env) {
  if (!env.K_env) return k_e;
  const double k_env = *env.K_env;
  if (!(k_env > 0.0)) throw InvalidParams("K_env must be positive");
  if (std::isinf(k_env)) return k_e;
  return k_e * k_env / (k_e + k_env);
}

// Applies a controller that acts through the motor torque input.
inline StateSpace close_motor_loop(const StateSpace& open,
                                   const ControllerSpec& c,
                                   const Matrix& pd_gain) {
  if (std::holds_alternative<NoControl>(c)) return open;
  if (std::holds_alternative<PDTorque>(c))
    return close_state_feedback(open, -pd_gain, "tau");
  if (const auto* sf = std::get_if<StateFeedback>(&c)) {
    Matrix gain = sf->gain;
    // A trailing zero for the static environment position is accepted.
    if (gain.rows() == 1 && gain.cols() == open.states() + 1 &&
        gain(0, open.states()) == 0.0)
      gain = gain.block(0, 0, 1, open.states());
    return close_state_feedback(open, gain, "tau");
  }
  if (const auto* lqr = std::get_if<Lqr>(&c)) {
    const LqrResult res = lqr_state_feedback(open, lqr->R);
    return close_state_feedback(open, res.gain, "tau");
  }
  throw InvalidParams("controller not applicable here");
}

}  // namespace detail

/// Robot against a grounded stiffness.
///
/// States ξ = [θ, θ̇, q, q̇] (NoMotor: [q, q̇]); inputs `delta` (unit
/// initial velocity on every inertia) and, without feedback, `tau`;
/// outputs f = K_e·q and fdot = K_e·q̇.
inline StateSpace build_grounded(const RobotParams& p, const ControllerSpec& c,
                                 const Grounded& env = {}) {
  p.validate();
  const double k_e = detail::series_stiffness(p.K_e, env);

  if (std::holds_alternative<NoMotor>(c)) {
    const Matrix a{{0.0, 1.0}, {-k_e / p.I, -p.V / p.I}};
    const Matrix b{{0.0}, {1.0}};
    const Matrix cw{{k_e, 0.0}, {0.0, k_e}};
    return {a, b, cw, Matrix(2, 1), {"delta"}, {"f", "fdot"}};
  }

  const Matrix a{
      {0.0, 1.0, 0.0, 0.0},
      {-p.K_jt / p.J, -p.B / p.J, p.K_jt / p.J, 0.0},
      {0.0, 0.0, 0.0, 1.0},
      {p.K_jt / p.I, 0.0, -(p.K_jt + k_e) / p.I, -p.V / p.I},
  };
  const Matrix b{{0.0, 0.0}, {1.0, 1.0 / p.J}, {0.0, 0.0}, {1.0, 0.0}};
  const Matrix cw{{0.0, 0.0, k_e, 0.0}, {0.0, 0.0, 0.0, k_e}};
  const StateSpace open{a, b, cw, Matrix(2, 2), {"delta", "tau"}, {"f", "fdot"}};

  PDTorque pd;
  if (const auto* given = std::get_if<PDTorque>(&c)) pd = *given;
  return detail::close_motor_loop(open, c, pd_torque_gain(p, pd));
}

/// Robot against a damped inertia, I_h·ẍ = f − B_h·ẋ with f = K_e(q − x).
///
/// The chain has no stiffness to ground, so absolute positions carry a
/// rigid-body mode that the force never sees. States are therefore spring
/// deflections and velocities, ξ = [θ − q, θ̇, q − x, q̇, ẋ]
/// (NoMotor: [q − x, q̇, ẋ]). The impulse sets θ̇ = q̇ = 1 with the
/// environment at rest.
inline StateSpace build_inertial(const RobotParams& p, const DampedInertia& env,
                                 const ControllerSpec& c) {
  p.validate();
  if (!(env.I_h > 0.0) || !std::isfinite(env.I_h))
    throw InvalidParams("I_h must be positive");
  if (!(env.B_h >= 0.0) || !std::isfinite(env.B_h))
    throw InvalidParams("B_h must be non-negative");
  const double k_e = p.K_e;

  if (std::holds_alternative<NoMotor>(c)) {
    const Matrix a{
        {0.0, 1.0, -1.0},
        {-k_e / p.I, -p.V / p.I, 0.0},
        {k_e / env.I_h, 0.0, -env.B_h / env.I_h},
    };
    const Matrix b{{0.0}, {1.0}, {0.0}};
    const Matrix cw{{k_e, 0.0, 0.0}, {0.0, k_e, -k_e}};
    return {a, b, cw, Matrix(2, 1), {"delta"}, {"f", "fdot"}};
  }

  const Matrix a{
      {0.0, 1.0, 0.0, -1.0, 0.0},
      {-p.K_jt / p.J, -p.B / p.J, 0.0, 0.0, 0.0},
      {0.0, 0.0, 0.0, 1.0, -1.0},
      {p.K_jt / p.I, 0.0, -k_e / p.I, -p.V / p.I, 0.0},
      {0.0, 0.0, k_e / env.I_h, 0.0, -env.B_h / env.I_h},
  };
  const Matrix b{{0.0, 0.0}, {1.0, 1.0 / p.J}, {0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}};
  const Matrix cw{{0.0, 0.0, k_e, 0.0, 0.0}, {0.0, 0.0, 0.0, k_e, -k_e}};
  const StateSpace open{a, b, cw, Matrix(2, 2), {"delta", "tau"}, {"f", "fdot"}};

  PDTorque pd;
  if (const auto* given = std::get_if<PDTorque>(&c)) pd = *given;
  // τ = −K_jt(K_p·(θ − q) + K_d·(θ̇ − q̇)) in deflection coordinates.
  const Matrix pd_gain{{pd.K_p * p.K_jt, pd.K_d * p.K_jt, 0.0, -pd.K_d * p.K_jt, 0.0}};
  return detail::close_motor_loop(open, c, pd_gain);
}

enum class Sensing { Impedance, Admittance };

inline std::string sensing_name(Sensing s) {
  return s == Sensing::Impedance ? "impedance" : "admittance";
}

/// Five-state estimation model ξ = [θ, θ̇, q, q̇, x] with a static
/// environment position x (ẋ = 0 unless driven through the `xdot` input).
/// K_int is the interface stiffness in both the dynamics and the admittance
/// emission. Outputs are the sensor emission y = C_y·ξ:
///   impedance:  [θ, K_jt(θ − q)]
///   admittance: [θ, K_int(q − x)]
inline StateSpace build_estimation(const RobotParams& p, Sensing sensing,
                                   double k_int) {
  p.validate();
  if (!(k_int > 0.0) || !std::isfinite(k_int))
    throw InvalidParams("K_int must be positive");
  const Matrix a{
      {0.0, 1.0, 0.0, 0.0, 0.0},
      {-p.K_jt / p.J, -p.B / p.J, p.K_jt / p.J, 0.0, 0.0},
      {0.0, 0.0, 0.0, 1.0, 0.0},
      {p.K_jt / p.I, 0.0, -(p.K_jt + k_int) / p.I, -p.V / p.I, k_int / p.I},
      {0.0, 0.0, 0.0, 0.0, 0.0},
  };
  const Matrix b{{0.0, 0.0, 0.0},
                 {1.0, 1.0 / p.J, 0.0},
                 {0.0, 0.0, 0.0},
                 {1.0, 0.0, 0.0},
                 {0.0, 0.0, 1.0}};
  Matrix cy(2, 5);
  cy(0, 0) = 1.0;
  std::string second;
  if (sensing == Sensing::Impedance) {
    cy(1, 0) = p.K_jt;
    cy(1, 2) = -p.K_jt;
    second = "joint_torque";
  } else {
    cy(1, 2) = k_int;
    cy(1, 4) = -k_int;
    second = "interface_force";
  }
  return {a, b, cy, Matrix(2, 3), {"delta", "tau", "xdot"}, {"theta", second}};
}

/// Admittance-controlled industrial arm against a stiff environment.
struct AdmittanceParams {
  double M_t = 100.0;      // target inertia [kg]
  double omega_t = 1.0;    // target natural frequency [rad/s]
  double xi = 0.7;         // target damping ratio
  double K_e = 5.6e4;      // environment stiffness [N/m]
  double M = 308.0;        // reflected robot mass [kg]
  double v0 = 1.0;         // contact velocity [m/s]

  void validate() const {
    for (auto [v, name] : {std::pair{M_t, "M_t"}, std::pair{omega_t, "omega_t"},
                           std::pair{xi, "xi"}, std::pair{K_e, "K_e"},
                           std::pair{M, "M"}, std::pair{v0, "v0"}}) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidParams(std::string(name) + " must be positive and finite");
    }
  }
};

/// Position-loop plant G(s) = 1/(M s² + 40 s).
inline RationalTF manutec_plant(const AdmittanceParams& a) {
  return {{1.0}, {0.0, 40.0, a.M}};
}

/// Position controller C(s) = 85 s + 370. It is a pure polynomial (improper
/// on its own), so it only enters through polynomial products.
inline Poly manutec_controller() { return {370.0, 85.0}; }

/// Target admittance A(s) = 1/(M_t (s² + 2ξω_t s + ω_t²)).
inline RationalTF manutec_admittance(const AdmittanceParams& a) {
  return {{1.0},
          {a.M_t * a.omega_t * a.omega_t, a.M_t * 2.0 * a.xi * a.omega_t, a.M_t}};
}

/// Closed-loop contact response F(s) = G/(1 + C·A·G·K_e + G·C + G·K_e)·M·v₀
/// with the position reference dropped, without any stability check.
///
/// Numerator and denominator are both multiplied by den_G·den_A, so the free
/// integrator of G cancels exactly.
inline RationalTF assemble_manutec(const AdmittanceParams& a) {
  a.validate();
  const RationalTF g = manutec_plant(a);
  const Poly c = manutec_controller();
  const RationalTF adm = manutec_admittance(a);

  // (1 + CAGK_e + GC + GK_e)·den_G·den_A, term by term.
  const Poly den = poly::add(
      poly::add(poly::mul(g.den(), adm.den()), poly::scale(c, a.K_e)),
      poly::add(poly::mul(c, adm.den()), poly::scale(adm.den(), a.K_e)));
  // G·M·v₀·den_G·den_A = den_A·M·v₀.
  const Poly num = poly::scale(adm.den(), a.M * a.v0);
  return {num, den};
}

/// assemble_manutec, rejecting closed loops that are not Hurwitz with
/// UnstableClosedLoop.
inline RationalTF build_manutec(const AdmittanceParams& a) {
  RationalTF f = assemble_manutec(a);
  if (!is_hurwitz(tf_to_ss(f).a()))
    throw UnstableClosedLoop("admittance closed loop is not Hurwitz (M_t=" +
                             std::to_string(a.M_t) + ", omega_t=" +
                             std::to_string(a.omega_t) + ")");
  return f;
}

/// Number of states for a controller variant on the grounded robot.
inline std::size_t grounded_state_count(const ControllerSpec& c) {
  return std::holds_alternative<NoMotor>(c) ? 2 : 4;
}

}  // namespace cnorm
