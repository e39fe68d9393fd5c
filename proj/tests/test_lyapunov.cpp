#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ddstab/controller.hpp"
#include "ddstab/kinematics.hpp"
#include "ddstab/lyapunov.hpp"

using namespace ddstab;
using Catch::Matchers::WithinAbs;

TEST_CASE("global energy values") {
  REQUIRE(V_global(NavState{0, 0, 0}, 0.17) == 0.0);
  REQUIRE(V_global(NavState{1, 0, 0}, 0.17) == 0.5);
  REQUIRE(V_global(NavState{1, 0, 0}, 3.0) == 0.5);
  REQUIRE_THAT(V_global(NavState{1, 1, 1}, 0.17), WithinAbs(1.085, 1e-15));
  REQUIRE_THAT(
      V_global(NavState{5.8523499553598128, 0.69842654761269085, 1.2220253232109897},
               0.17),
      WithinAbs(17.495834221903451, 1e-12));
  REQUIRE_THROWS_AS(V_global(NavState{1, 0, 0}, 0.0), std::invalid_argument);
}

TEST_CASE("global energy is positive definite") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> rad(-20.0, 20.0);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (int i = 0; i < 5000; ++i) {
    const NavState nav{std::abs(rad(rng)), ang(rng), ang(rng)};
    const double v = V_global(nav, 0.17);
    REQUIRE(v >= 0.0);
    if (nav.rho != 0.0 || nav.alpha != 0.0 || nav.beta != 0.0) {
      REQUIRE(v > 0.0);
    }
  }
}

TEST_CASE("local energy values") {
  REQUIRE(V_local(NavState{0, 0, 0}) == 0.0);
  REQUIRE_THAT(V_local(NavState{0.5, 0.2, 0.2}), WithinAbs(0.125, 1e-15));
  REQUIRE_THAT(V_local(NavState{0, 0.1, 0.4}), WithinAbs(0.045000000000000012, 1e-16));
}

TEST_CASE("delta_V exact and first-order forms") {
  const DeltaV zero = delta_V(NavState{1, 0.2, 0.3}, NavState{1, 0.2, 0.3},
                              Regime::GLOBAL, 0.17);
  REQUIRE(zero.exact == 0.0);
  REQUIRE(zero.first_order == 0.0);

  const DeltaV step = delta_V(NavState{1, 0, 0}, NavState{0.9, 0, 0}, Regime::GLOBAL,
                              0.17);
  REQUIRE_THAT(step.exact, WithinAbs(-0.094999999999999973, 1e-15));
  REQUIRE_THAT(step.first_order, WithinAbs(-0.099999999999999978, 1e-15));
}

TEST_CASE("first-order form matches the exact difference on small steps") {
  // The gap between the forms is exactly the quadratic remainder
  // (dr^2 + da^2 + h db^2)/2 (resp. (dr^2 + dtheta^2)/2), so it is O(|step|^2);
  // relative to the exact difference it stays below 1e-2 whenever the linear
  // term is not itself cancelling down to quadratic size.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> rad(0.5, 10.0);
  std::uniform_real_distribution<double> ang(-2.0, 2.0);
  std::uniform_real_distribution<double> eps(-1e-3, 1e-3);
  const double h = 0.17;
  for (int i = 0; i < 5000; ++i) {
    const NavState before{rad(rng), ang(rng), ang(rng)};
    const double dr = eps(rng);
    const double da = eps(rng);
    const double db = eps(rng);
    const NavState after{before.rho + dr, before.alpha + da, before.beta + db};

    // Remainders are bounded by 1.1e-6 (global) and 2.5e-6 (local, |dtheta|
    // can reach 2e-3), so 1% dominance is guaranteed once |exact| >= 3e-4.
    const DeltaV g = delta_V(before, after, Regime::GLOBAL, h);
    const double g_rem = 0.5 * (dr * dr + da * da + h * db * db);
    REQUIRE_THAT(g.exact - g.first_order, WithinAbs(g_rem, 1e-12));
    if (std::abs(g.exact) >= 3e-4) {
      REQUIRE(std::abs(g.first_order - g.exact) <= 1e-2 * std::abs(g.exact));
    }

    const DeltaV l = delta_V(before, after, Regime::LOCAL, h);
    const double dtheta = wrap_angle(wrap_angle(after.beta - after.alpha) -
                                     wrap_angle(before.beta - before.alpha));
    const double l_rem = 0.5 * (dr * dr + dtheta * dtheta);
    REQUIRE_THAT(l.exact - l.first_order, WithinAbs(l_rem, 1e-12));
    if (std::abs(l.exact) >= 3e-4) {
      REQUIRE(std::abs(l.first_order - l.exact) <= 1e-2 * std::abs(l.exact));
    }
  }
}

TEST_CASE("delta_V wraps angle differences across the branch cut") {
  const NavState before{1.0, 3.1, 0.0};
  const NavState after{1.0, -3.1, 0.0};  // physically a +0.083 rad move
  const DeltaV d = delta_V(before, after, Regime::GLOBAL, 0.17);
  const double true_dalpha = wrap_angle(after.alpha - before.alpha);
  REQUIRE_THAT(d.first_order, WithinAbs(before.alpha * true_dalpha, 1e-12));
  REQUIRE(std::abs(d.first_order) < 1.0);
}

TEST_CASE("one noise-free closed-loop step decreases the global energy") {
  const Pose goal{0, 0, 0};
  const Pose start = make_pose(-2.0, -5.5, 30.0 * kPi / 180.0);
  const NavState before = to_nav_state(start, goal);

  ControllerParams params;
  params.eps_P = 0.5;
  const MeasuredNavState m{before.rho, before.alpha, before.beta, start.theta};
  const VelocityCommand cmd = global_law(m, params, classify_alpha(before.alpha));
  const Pose next = cartesian_step(start, cmd, 0.1);
  const NavState after = to_nav_state(next, goal);

  const DeltaV d = delta_V(before, after, Regime::GLOBAL, 0.17);
  REQUIRE(d.exact < 0.0);
  REQUIRE_THAT(d.exact, WithinAbs(-0.4872527081487199, 1e-12));
}
