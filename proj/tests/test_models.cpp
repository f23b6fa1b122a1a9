#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "support.hpp"

using namespace cnorm;
using cnorm::testing::rel_err;

namespace {

std::vector<ControllerSpec> all_variants() {
  return {NoControl{}, NoMotor{}, PDTorque{}, Lqr{}};
}

}  // namespace

TEST(Grounded, MotorStiffnessEntry) {
  const StateSpace m = build_grounded(RobotParams::nominal(), NoControl{});
  EXPECT_NEAR(m.a()(1, 0), -3134.8, 0.05);
  EXPECT_DOUBLE_EQ(m.a()(1, 0), -10000.0 / 3.19);
  EXPECT_DOUBLE_EQ(m.a()(3, 2), -(10000.0 + 30000.0) / 4.5);
  EXPECT_EQ(m.input_column("delta"), (Matrix{{0}, {1}, {0}, {1}}));
  EXPECT_EQ(m.input_column("tau"), (Matrix{{0}, {1 / 3.19}, {0}, {0}}));
  EXPECT_EQ(m.c(), (Matrix{{0, 0, 30000, 0}, {0, 0, 0, 30000}}));
}

TEST(Grounded, PdGainValues) {
  const Matrix k = pd_torque_gain(RobotParams::nominal(), PDTorque{1.5, 0.2});
  EXPECT_EQ(k, (Matrix{{15000, 2000, -15000, -2000}}));
}

TEST(Grounded, PdIsNegativeFeedbackOfTheGain) {
  const RobotParams p = RobotParams::nominal();
  const StateSpace open = build_grounded(p, NoControl{});
  const StateSpace pd = build_grounded(p, PDTorque{});
  const StateSpace manual = close_state_feedback(open, -pd_torque_gain(p, PDTorque{}), "tau");
  EXPECT_EQ(pd.a(), manual.a());
  EXPECT_EQ(pd.b(), manual.b());
  EXPECT_EQ(pd.c(), manual.c());
  EXPECT_EQ(pd.d(), manual.d());
  // The positive-feedback reading destabilizes the joint.
  EXPECT_FALSE(is_hurwitz(close_state_feedback(open, pd_torque_gain(p, PDTorque{}), "tau").a()));
}

TEST(Grounded, StateFeedbackAcceptsPaddedGain) {
  const RobotParams p = RobotParams::nominal();
  const Matrix k4{{-100, -10, 50, -5}};
  const Matrix k5{{-100, -10, 50, -5, 0}};
  EXPECT_EQ(build_grounded(p, StateFeedback{k4}).a(), build_grounded(p, StateFeedback{k5}).a());
  EXPECT_THROW(build_grounded(p, StateFeedback{Matrix{{1, 2}}}), DimensionMismatch);
}

TEST(Grounded, SeriesEnvironmentStiffness) {
  RobotParams p = RobotParams::nominal();
  const double k_env = 60e3;
  const StateSpace series = build_grounded(p, NoControl{}, Grounded{k_env});
  RobotParams q = p;
  q.K_e = p.K_e * k_env / (p.K_e + k_env);
  EXPECT_LE(max_abs_diff(series.a(), build_grounded(q, NoControl{}).a()), 1e-9);
  const StateSpace inf =
      build_grounded(p, NoControl{}, Grounded{std::numeric_limits<double>::infinity()});
  EXPECT_EQ(inf.a(), build_grounded(p, NoControl{}).a());
  const StateSpace stiff = build_grounded(p, NoControl{}, Grounded{1e15});
  EXPECT_LE(max_abs_diff(stiff.a(), build_grounded(p, NoControl{}).a()), 1e-6);
  EXPECT_THROW(build_grounded(p, NoControl{}, Grounded{-1.0}), InvalidParams);
}

TEST(Grounded, NoMotorIsTwoStateLinkModel) {
  const StateSpace m = build_grounded(RobotParams::nominal(), NoMotor{});
  EXPECT_EQ(m.states(), 2u);
  EXPECT_EQ(m.a(), (Matrix{{0, 1}, {-30000 / 4.5, -20.3 / 4.5}}));
  EXPECT_EQ(grounded_state_count(NoMotor{}), 2u);
  EXPECT_EQ(grounded_state_count(Lqr{}), 4u);
}

TEST(Grounded, DampedModelsAreHurwitzWithoutFeedthrough) {
  for (double k : {20.0, 1e3, 1e4, 1e5}) {
    RobotParams p = RobotParams::nominal();
    p.K_jt = k;
    for (const auto& c : all_variants()) {
      const StateSpace m = build_grounded(p, c);
      EXPECT_TRUE(is_hurwitz(m.a())) << controller_name(c) << " K_jt=" << k;
      EXPECT_EQ(m.d().col(m.input_index("delta")).max_abs(), 0.0);
    }
  }
}

TEST(Grounded, LowStiffnessMotorIsIrrelevant) {
  RobotParams p = RobotParams::nominal();
  p.K_jt = 20.0;
  const double with_motor = sobolev_norm(build_grounded(p, NoControl{}), "delta").bound;
  const double link_only = sobolev_norm(build_grounded(p, NoMotor{}), "delta").bound;
  EXPECT_LE(rel_err(with_motor, link_only), 5e-3);
}

TEST(Grounded, InvalidParams) {
  RobotParams p = RobotParams::nominal();
  p.J = 0.0;
  EXPECT_THROW(build_grounded(p, NoControl{}), InvalidParams);
  p = RobotParams::nominal();
  p.V = -1.0;
  EXPECT_THROW(build_grounded(p, NoControl{}), InvalidParams);
  p = RobotParams::nominal();
  p.B = 0.0;  // undamped motor is allowed
  EXPECT_NO_THROW(build_grounded(p, NoControl{}));
  EXPECT_THROW(build_grounded(RobotParams::nominal(), Lqr{0.0}), InvalidParams);
}

TEST(Inertial, HeavyEnvironmentRecoversGround) {
  const RobotParams p = RobotParams::nominal();
  for (const auto& c : all_variants()) {
    const StateSpace heavy = build_inertial(p, DampedInertia{0.0, 1e6 * p.I}, c);
    const double peak = simulate_impulse(heavy, "delta").peak();
    const double ground = simulate_impulse(build_grounded(p, c), "delta").peak();
    EXPECT_LE(rel_err(peak, ground), 1e-2) << controller_name(c);
  }
}

TEST(Inertial, ImpactMomentum) {
  const RobotParams p = RobotParams::nominal();
  const DampedInertia env{3.0, 0.024};
  const StateSpace m = build_inertial(p, env, NoControl{});
  // Momentum weights on [θ − q, θ̇, q − x, q̇, ẋ].
  const Matrix weights{{0, p.J, 0, p.I, env.I_h}};
  EXPECT_DOUBLE_EQ((weights * m.input_column("delta"))(0, 0), p.J + p.I);
  EXPECT_EQ(m.input_column("delta")(4, 0), 0.0);
}

TEST(Inertial, ForceOutputsAndStability) {
  const RobotParams p = RobotParams::nominal();
  const DampedInertia env{42.1875, 98.4375};
  for (const auto& c : all_variants()) {
    const StateSpace m = build_inertial(p, env, c);
    EXPECT_TRUE(is_hurwitz(m.a())) << controller_name(c);
    EXPECT_GE(sobolev_norm(m, "delta").bound, simulate_impulse(m, "delta").peak());
  }
  const StateSpace m = build_inertial(p, env, NoControl{});
  EXPECT_EQ(m.c(), (Matrix{{0, 0, p.K_e, 0, 0}, {0, 0, 0, p.K_e, -p.K_e}}));
  EXPECT_THROW(build_inertial(p, DampedInertia{1.0, 0.0}, NoControl{}), InvalidParams);
  EXPECT_THROW(build_inertial(p, DampedInertia{-1.0, 1.0}, NoControl{}), InvalidParams);
}

TEST(Inertial, HumanParameterRow) {
  ExperimentConfig cfg("sweep-inertial");
  cfg.set("r_values", "0.2");
  const ResultTable t = run(cfg);
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_NEAR(t.rows[0].params[1], 400.0, 1e-9);  // K_e = 10·0.2² kN·m/rad
  EXPECT_NEAR(t.rows[0].params[2], 3.0, 1e-12);   // B_h = 75·0.2²
  EXPECT_NEAR(t.rows[0].params[3], 0.024, 1e-15);  // I_h = 0.6·0.2²
}

TEST(Estimation, EmissionRows) {
  const RobotParams p = RobotParams::nominal();
  const StateSpace imp = build_estimation(p, Sensing::Impedance, 5e3);
  EXPECT_EQ(imp.c().row_at(1), (Matrix{{p.K_jt, 0, -p.K_jt, 0, 0}}));
  EXPECT_EQ(imp.c().row_at(0), (Matrix{{1, 0, 0, 0, 0}}));
  const StateSpace adm = build_estimation(p, Sensing::Admittance, 5e3);
  EXPECT_EQ(adm.c().row_at(1), (Matrix{{0, 0, 5e3, 0, -5e3}}));
  EXPECT_EQ(adm.output_labels()[1], "interface_force");
}

TEST(Estimation, EnvironmentColumnOnlyCouplesThroughInterface) {
  const StateSpace m = build_estimation(RobotParams::nominal(), Sensing::Admittance, 7e3);
  for (std::size_t i = 0; i < 5; ++i) {
    if (i == 3) {
      EXPECT_DOUBLE_EQ(m.a()(i, 4), 7e3 / 4.5);
    } else {
      EXPECT_EQ(m.a()(i, 4), 0.0);
    }
  }
  EXPECT_EQ(m.a().row_at(4).max_abs(), 0.0);
  EXPECT_THROW(build_estimation(RobotParams::nominal(), Sensing::Impedance, 0.0),
               InvalidParams);
}

TEST(Manutec, RelativeDegreeAndDcGain) {
  AdmittanceParams a;
  a.M_t = 100.0;
  a.omega_t = 1.0;
  a.xi = 1.0;
  const RationalTF f = assemble_manutec(a);
  EXPECT_EQ(relative_degree(f), 2u);
  EXPECT_EQ(f.num().size(), 3u);
  EXPECT_EQ(f.den().size(), 5u);
  const std::complex<double> dc = evaluate(f, 0.0);
  EXPECT_TRUE(std::isfinite(dc.real()));
  // G's integrator cancels: the constant term of the denominator is
  // K_e·C(0) + C(0)·den_A(0) + K_e·den_A(0).
  const double den_a0 = a.M_t * a.omega_t * a.omega_t;
  EXPECT_DOUBLE_EQ(f.den()[0], a.K_e * 370.0 + 370.0 * den_a0 + a.K_e * den_a0);
}

TEST(Manutec, ContactVelocityIsLinear) {
  AdmittanceParams a;
  a.M_t = 400.0;
  a.omega_t = 8.0;
  AdmittanceParams b = a;
  b.v0 = 2.0;
  const RationalTF fa = build_manutec(a), fb = build_manutec(b);
  for (std::complex<double> s : {std::complex<double>(0.0, 1.0), {1.0, 3.0}, {0.0, 40.0}})
    EXPECT_LE(std::abs(evaluate(fb, s) - 2.0 * evaluate(fa, s)), 1e-12 * std::abs(evaluate(fb, s)));
}

TEST(Manutec, UnstableLoopIsReported) {
  AdmittanceParams a;
  a.M_t = 25.0;
  a.omega_t = 0.5;
  EXPECT_FALSE(is_hurwitz(tf_to_ss(assemble_manutec(a)).a()));
  EXPECT_THROW(build_manutec(a), UnstableClosedLoop);
  a.xi = 0.0;
  EXPECT_THROW(assemble_manutec(a), InvalidParams);
}

TEST(Controllers, Names) {
  EXPECT_EQ(controller_name(NoControl{}), "nocontrol");
  EXPECT_EQ(controller_name(NoMotor{}), "nomotor");
  EXPECT_EQ(controller_name(PDTorque{}), "pd");
  EXPECT_EQ(controller_name(Lqr{}), "lqr");
  EXPECT_EQ(controller_name(StateFeedback{}), "statefeedback");
}
