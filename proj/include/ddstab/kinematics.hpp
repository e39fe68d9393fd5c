#pragma once

// Coordinate transforms and one-step discrete kinematics of the
// differential-drive robot, in Cartesian and polar navigation-variable form.

#include <cmath>
#include <stdexcept>

#include "ddstab/types.hpp"

namespace ddstab {

// Motion direction implied by the bearing error: FORWARD when the goal lies
// strictly within +-pi/2 of the heading, BACKWARD otherwise (reverse gear).
enum class AlphaBranch { FORWARD, BACKWARD };

inline const char* to_string(AlphaBranch b) {
  return b == AlphaBranch::FORWARD ? "FORWARD" : "BACKWARD";
}

inline AlphaBranch classify_alpha(double alpha) {
  return std::abs(alpha) < kPi / 2.0 ? AlphaBranch::FORWARD : AlphaBranch::BACKWARD;
}

// Goal-relative polar state of a pose: rho = distance, alpha = bearing error
// relative to heading, beta = theta + alpha (goal-frame orientation). At
// rho = 0 the bearing is defined as 0, so alpha = wrap(-theta).
inline NavState to_nav_state(const Pose& pose, const Pose& goal) {
  if (!is_finite(pose) || !is_finite(goal)) {
    throw std::invalid_argument("to_nav_state: non-finite pose");
  }
  const double dx = goal.x - pose.x;
  const double dy = goal.y - pose.y;
  const double rho = std::hypot(dx, dy);
  const double bearing = rho == 0.0 ? 0.0 : std::atan2(dy, dx);
  const double alpha = wrap_angle(bearing - pose.theta);
  const double beta = wrap_angle(pose.theta + alpha);
  return NavState{rho, alpha, beta};
}

// Forward-Euler step of the Cartesian unicycle model.
inline Pose cartesian_step(const Pose& pose, const VelocityCommand& cmd, double Ts) {
  if (!(Ts > 0.0)) {
    throw std::invalid_argument("cartesian_step: Ts must be > 0");
  }
  // An overflowed heading is returned unwrapped so callers can detect the
  // non-finite state instead of tripping wrap_angle's input check.
  const double theta_next = pose.theta + Ts * cmd.omega;
  return Pose{pose.x + Ts * cmd.v * std::cos(pose.theta),
              pose.y + Ts * cmd.v * std::sin(pose.theta),
              std::isfinite(theta_next) ? wrap_angle(theta_next) : theta_next};
}

namespace detail {

// Shared polar update; the BACKWARD branch is the FORWARD one with v negated
// (the redefined forward direction of reverse-gear motion).
inline NavState polar_step_impl(const NavState& nav, double v, double omega, double Ts,
                                AlphaBranch branch) {
  if (!(nav.rho > 0.0)) {
    throw std::domain_error("polar_step: degenerate state, rho must be > 0");
  }
  if (!(Ts > 0.0)) {
    throw std::invalid_argument("polar_step: Ts must be > 0");
  }
  const double ve = branch == AlphaBranch::FORWARD ? v : -v;
  const double swing = ve * Ts * std::sin(nav.alpha) / nav.rho;
  double rho_next = nav.rho - ve * Ts * std::cos(nav.alpha);
  if (rho_next < 0.0) {
    rho_next = 0.0;
  }
  return NavState{rho_next, wrap_angle(nav.alpha + swing - omega * Ts),
                  wrap_angle(nav.beta + swing)};
}

}  // namespace detail

// One discrete step of the polar navigation dynamics.
inline NavState polar_step(const NavState& nav, const VelocityCommand& cmd, double Ts,
                           AlphaBranch branch) {
  return detail::polar_step_impl(nav, cmd.v, cmd.omega, Ts, branch);
}

// Polar step with actuation noise: the plant executes (v + eps_v,
// omega + eps_omega). Zero noise reproduces polar_step bitwise.
inline NavState noisy_polar_step(const NavState& nav, const VelocityCommand& cmd,
                                 double eps_v, double eps_omega, double Ts,
                                 AlphaBranch branch) {
  return detail::polar_step_impl(nav, cmd.v + eps_v, cmd.omega + eps_omega, Ts, branch);
}

}  // namespace ddstab
