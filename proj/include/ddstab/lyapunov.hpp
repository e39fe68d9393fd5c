#pragma once

// Lyapunov-function evaluators for both regimes and their per-step
// differences, used by the property tests and the analyze subcommand.

#include <stdexcept>

#include "ddstab/types.hpp"

namespace ddstab {

struct LyapunovRecord {
  double V = 0.0;        // energy at the step's pre-update state
  double delta_V = 0.0;  // V(next) - V(this), exact
  Regime regime = Regime::GLOBAL;
  int step_index = 0;
};

// Global-regime energy: (rho^2 + alpha^2 + h beta^2) / 2.
inline double V_global(const NavState& nav, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("V_global: h must be > 0");
  }
  return 0.5 * nav.rho * nav.rho + 0.5 * nav.alpha * nav.alpha +
         0.5 * h * nav.beta * nav.beta;
}

// Local-regime energy: (rho^2 + theta^2) / 2 with theta = wrap(beta - alpha).
inline double V_local(const NavState& nav) {
  const double theta = wrap_angle(nav.beta - nav.alpha);
  return 0.5 * nav.rho * nav.rho + 0.5 * theta * theta;
}

// Exact difference V(after) - V(before) and its first-order (inner-product)
// form sum_i x_i * dx_i. Stability assertions use the exact difference; the
// first-order form drops the quadratic dx^2/2 terms and is reported for
// diagnostic comparison. Angle differences are wrapped before multiplying to
// avoid spurious 2*pi jumps.
struct DeltaV {
  double exact = 0.0;
  double first_order = 0.0;
};

inline DeltaV delta_V(const NavState& before, const NavState& after, Regime which,
                      double h) {
  DeltaV d;
  if (which == Regime::GLOBAL) {
    d.exact = V_global(after, h) - V_global(before, h);
    d.first_order = before.rho * (after.rho - before.rho) +
                    before.alpha * wrap_angle(after.alpha - before.alpha) +
                    h * before.beta * wrap_angle(after.beta - before.beta);
  } else {
    const double th_before = wrap_angle(before.beta - before.alpha);
    const double th_after = wrap_angle(after.beta - after.alpha);
    d.exact = V_local(after) - V_local(before);
    d.first_order = before.rho * (after.rho - before.rho) +
                    th_before * wrap_angle(th_after - th_before);
  }
  return d;
}

}  // namespace ddstab
