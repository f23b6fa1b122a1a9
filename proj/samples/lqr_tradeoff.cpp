// Collision bound vs. control effort: sweeps the LQR torque weight R on the
// default flexible-joint robot and prints the bound next to the open loop.

#include <cstdio>

#include "collision_norm/collision_norm.hpp"

int main() {
  using namespace cnorm;
  const RobotParams p = RobotParams::nominal();
  const SobolevNorm open = sobolev_norm(build_grounded(p, NoControl{}), "delta");
  std::printf("open loop bound %.1f N·m\n", open.bound);
  std::printf("%10s %12s %12s %12s\n", "R", "bound", "sim peak", "min cost");
  for (double r : {1e-2, 1e-1, 1.0, 5.0, 50.0, 1e3, 1e6}) {
    const StateSpace closed = build_grounded(p, Lqr{r});
    const SobolevNorm sn = sobolev_norm(closed, "delta");
    const ImpulseResponse resp = simulate_impulse(closed, "delta");
    const LqrResult lqr = lqr_gain(build_grounded(p, NoControl{}), r);
    std::printf("%10g %12.1f %12.1f %12.4g\n", r, sn.bound, resp.peak(), lqr.min_cost);
  }
}
