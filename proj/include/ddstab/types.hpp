#pragma once

// Core value types and angle/wheel utilities for the differential-drive
// stabilization library.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace ddstab {

inline constexpr double kPi = std::numbers::pi;

// Wraps an angle to the principal branch (-pi, pi].
inline double wrap_angle(double a) {
  if (!std::isfinite(a)) {
    throw std::invalid_argument("wrap_angle: non-finite angle");
  }
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) {
    w = kPi;
  }
  return w;
}

struct Pose {
  double x = 0.0;      // [m]
  double y = 0.0;      // [m]
  double theta = 0.0;  // [rad] in (-pi, pi]
};

// Builds a pose with the heading normalized to the principal branch.
inline Pose make_pose(double x, double y, double theta) {
  return Pose{x, y, wrap_angle(theta)};
}

inline bool is_finite(const Pose& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.theta);
}

// Goal-relative polar navigation state.
struct NavState {
  double rho = 0.0;    // [m] distance to goal, >= 0
  double alpha = 0.0;  // [rad] bearing-to-goal error relative to heading, in (-pi, pi]
  double beta = 0.0;   // [rad] goal-frame orientation angle (theta + alpha), in (-pi, pi]
};

struct VelocityCommand {
  double v = 0.0;      // [m/s] linear velocity
  double omega = 0.0;  // [rad/s] angular velocity
};

struct RobotGeometry {
  double wheel_radius = 0.05;     // [m]
  double wheel_separation = 0.6;  // [m]
};

struct ControllerParams {
  double gamma = 1.3;  // [m/s] velocity cap and gain
  double k = 1.0;      // [1/s] global angular gain
  double h = 0.17;     // [-] beta weight in the global law
  double k2 = 2.7;     // [1/s] local heading gain
  // [m] global->local switch radius; NaN requests derivation from the noise
  // bounds (see resolve_switch_radius).
  double eps_P = std::numeric_limits<double>::quiet_NaN();
};

struct NoiseBounds {
  double eps_X_max = 0.0;      // [m]
  double eps_Y_max = 0.0;      // [m]
  double eps_theta_max = 0.0;  // [rad]
  double eps_v_max = 0.0;      // [m/s]
  double eps_omega_max = 0.0;  // [rad/s]
};

// Reference noise magnitudes used throughout the test campaigns.
inline NoiseBounds reference_noise_bounds() {
  return NoiseBounds{0.3, 0.3, 0.17, 0.065, 0.2167};
}

inline bool is_noise_free(const NoiseBounds& b) {
  return b.eps_X_max == 0.0 && b.eps_Y_max == 0.0 && b.eps_theta_max == 0.0 &&
         b.eps_v_max == 0.0 && b.eps_omega_max == 0.0;
}

// Operating regime of the two-regime law. Transitions are latched:
// once LOCAL, an episode never returns to GLOBAL.
enum class Regime { GLOBAL, LOCAL };

inline const char* to_string(Regime r) {
  return r == Regime::GLOBAL ? "GLOBAL" : "LOCAL";
}

// Wheel angular speeds (omega_L, omega_R) realizing a body-frame command:
// v = R(omega_L + omega_R)/2, omega = R(omega_R - omega_L)/L.
inline std::pair<double, double> command_to_wheel_speeds(const VelocityCommand& cmd,
                                                         const RobotGeometry& geom) {
  if (!(geom.wheel_radius > 0.0) || !(geom.wheel_separation > 0.0)) {
    throw std::invalid_argument("command_to_wheel_speeds: invalid geometry");
  }
  const double omega_l =
      (2.0 * cmd.v - geom.wheel_separation * cmd.omega) / (2.0 * geom.wheel_radius);
  const double omega_r =
      (2.0 * cmd.v + geom.wheel_separation * cmd.omega) / (2.0 * geom.wheel_radius);
  return {omega_l, omega_r};
}

// Worst-case measured-distance error implied by the bounds: an upper bound on
// |rho_m - rho| plus the actuation slack eps_v/gamma. The switch radius must
// exceed this margin for the local handoff to be meaningful under noise.
inline double switch_radius_margin(const NoiseBounds& b, double gamma) {
  return std::hypot(b.eps_X_max, b.eps_Y_max) + b.eps_v_max / gamma;
}

// Default switch radius: the margin rounded up to the next 0.1 m (strictly
// above the margin), floored at 20x the arrival tolerance so that noise-free
// runs hand off close enough to the goal for the local law to finish the job.
inline double resolve_switch_radius(const NoiseBounds& b, double gamma, double rho_tol) {
  const double floor_radius = 20.0 * rho_tol;
  const double margin = switch_radius_margin(b, gamma);
  if (margin <= 0.0) {
    return floor_radius;
  }
  double r = std::ceil(margin * 10.0) / 10.0;
  if (r <= margin) {
    r += 0.1;
  }
  return std::max(r, floor_radius);
}

inline void validate_bounds(const NoiseBounds& b) {
  const double vals[] = {b.eps_X_max, b.eps_Y_max, b.eps_theta_max, b.eps_v_max,
                         b.eps_omega_max};
  for (double v : vals) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("NoiseBounds: bounds must be finite and >= 0");
    }
  }
}

// Validates gains and the switch radius against the noise bounds.
inline void validate_params(const ControllerParams& p, const NoiseBounds& b) {
  if (!(p.gamma > 0.0) || !(p.k > 0.0) || !(p.h > 0.0) || !(p.k2 > 0.0)) {
    throw std::invalid_argument("ControllerParams: gamma, k, h, k2 must be > 0");
  }
  if (!std::isfinite(p.eps_P) || !(p.eps_P > 0.0)) {
    throw std::invalid_argument("ControllerParams: eps_P must be finite and > 0");
  }
  if (!(p.eps_P > switch_radius_margin(b, p.gamma))) {
    throw std::invalid_argument(
        "ControllerParams: eps_P must exceed the measured-distance noise margin "
        "sqrt(eps_X_max^2 + eps_Y_max^2) + eps_v_max/gamma = " +
        std::to_string(switch_radius_margin(b, p.gamma)));
  }
}

}  // namespace ddstab
