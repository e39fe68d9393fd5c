#pragma once

// The two-regime stabilizing control law. Far from the goal (GLOBAL) a
// saturated polar-state law drives distance and bearing error down; inside
// the switch radius (LOCAL) the heading is regulated directly through
// theta = beta - alpha, whose measurement is immune to position noise.

#include <cmath>
#include <stdexcept>
#include <utility>

#include "ddstab/kinematics.hpp"
#include "ddstab/noise.hpp"
#include "ddstab/types.hpp"

namespace ddstab {

struct ControllerState {
  Regime regime = Regime::GLOBAL;  // latched: GLOBAL -> LOCAL only
  ControllerParams params{};
};

namespace detail {

// sin(a)/a with the removable singularity filled in.
inline double sinc(double a) { return std::abs(a) < 1e-8 ? 1.0 : std::sin(a) / a; }

// tanh(rho)/rho with the removable singularity filled in (limit 1 at 0).
inline double tanh_over(double rho) { return rho == 0.0 ? 1.0 : std::tanh(rho) / rho; }

// Branch-signed saturated linear velocity shared by both regimes. The
// BACKWARD branch negates the command so that reverse-gear motion still
// closes on the goal; the commanded magnitude never exceeds gamma.
inline double branch_velocity(const MeasuredNavState& meas, const ControllerParams& p,
                              AlphaBranch branch) {
  const double v = p.gamma * std::tanh(meas.rho_m) * std::cos(meas.alpha_m);
  return branch == AlphaBranch::FORWARD ? v : -v;
}

}  // namespace detail

// Global-regime law.
inline VelocityCommand global_law(const MeasuredNavState& meas, const ControllerParams& p,
                                  AlphaBranch branch) {
  if (meas.rho_m < 0.0) {
    throw std::domain_error("global_law: degenerate measurement, rho_m must be >= 0");
  }
  const double a = meas.alpha_m;
  const double omega = p.k * a + p.gamma * detail::sinc(a) * detail::tanh_over(meas.rho_m) *
                                     std::cos(a) * (a + p.h * meas.beta_m);
  return VelocityCommand{detail::branch_velocity(meas, p, branch), omega};
}

// Local-regime law: same velocity rule; the heading is regulated through
// theta_hat = wrap(beta_m - alpha_m), which cancels the position-measurement
// noise common to both angles.
inline VelocityCommand local_law(const MeasuredNavState& meas, const ControllerParams& p,
                                 AlphaBranch branch) {
  const double theta_hat = wrap_angle(meas.beta_m - meas.alpha_m);
  return VelocityCommand{detail::branch_velocity(meas, p, branch), -p.k2 * theta_hat};
}

// Latched regime dispatch: enter LOCAL the first time the measured distance
// falls inside eps_P; never revert (a noise spike on rho_m would otherwise
// chatter between the laws).
inline Regime select_regime(const ControllerState& state, const MeasuredNavState& meas) {
  if (state.regime == Regime::LOCAL) {
    return Regime::LOCAL;
  }
  return meas.rho_m <= state.params.eps_P ? Regime::LOCAL : Regime::GLOBAL;
}

// One controller evaluation: pick the regime, classify the motion branch from
// the measured bearing error, and dispatch. Returns the command and the
// updated (latched) regime; the caller owns the regime state.
inline std::pair<VelocityCommand, Regime> compute_command(const ControllerState& state,
                                                          const MeasuredNavState& meas) {
  const Regime regime = select_regime(state, meas);
  const AlphaBranch branch = classify_alpha(meas.alpha_m);
  const VelocityCommand cmd = regime == Regime::GLOBAL
                                  ? global_law(meas, state.params, branch)
                                  : local_law(meas, state.params, branch);
  return {cmd, regime};
}

}  // namespace ddstab
