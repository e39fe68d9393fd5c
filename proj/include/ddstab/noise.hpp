#pragma once

// Seeded bounded-noise generation and the noisy measurement channel: the
// controller never sees the true pose, only navigation variables computed
// from a corrupted one.

#include <cstdint>
#include <random>

#include "ddstab/kinematics.hpp"
#include "ddstab/types.hpp"

namespace ddstab {

// One per-step disturbance draw; each component is bounded by its entry in
// NoiseBounds.
struct NoiseSample {
  double eps_X = 0.0;      // [m]
  double eps_Y = 0.0;      // [m]
  double eps_theta = 0.0;  // [rad]
  double eps_v = 0.0;      // [m/s]
  double eps_omega = 0.0;  // [rad/s]
};

// Navigation variables as the controller sees them (computed from the
// noise-corrupted pose), plus the corrupted heading.
struct MeasuredNavState {
  double rho_m = 0.0;    // [m] >= 0
  double alpha_m = 0.0;  // [rad] in (-pi, pi]
  double beta_m = 0.0;   // [rad] in (-pi, pi]
  double theta_m = 0.0;  // [rad] in (-pi, pi]
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent, reproducible per-run stream seed for a campaign.
inline std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return splitmix64(master_seed ^ splitmix64(run_index));
}

// Seeded RNG stream owned by one episode.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : rng_(seed) {}

  // Uniform in [0, 1) with 53 random bits (engine-exact, platform-stable).
  double uniform_unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  // Uniform on [-magnitude, +magnitude].
  double uniform_pm(double magnitude) { return magnitude * (2.0 * uniform_unit() - 1.0); }

 private:
  std::mt19937_64 rng_;
};

// Draws one disturbance sample, each component independent and uniform within
// its bound. Component order is fixed (X, Y, theta, v, omega) so streams are
// reproducible.
inline NoiseSample draw_sample(const NoiseBounds& bounds, NoiseStream& stream) {
  NoiseSample s;
  s.eps_X = stream.uniform_pm(bounds.eps_X_max);
  s.eps_Y = stream.uniform_pm(bounds.eps_Y_max);
  s.eps_theta = stream.uniform_pm(bounds.eps_theta_max);
  s.eps_v = stream.uniform_pm(bounds.eps_v_max);
  s.eps_omega = stream.uniform_pm(bounds.eps_omega_max);
  return s;
}

// Measurement channel: corrupt the pose by the sample, then transform to
// navigation variables. Evaluating the transform on the corrupted pose
// realizes the corrupted polar quantities directly and is immune to
// wrap-around inconsistencies.
inline MeasuredNavState measure(const Pose& true_pose, const Pose& goal,
                                const NoiseSample& sample) {
  const Pose corrupted{true_pose.x + sample.eps_X, true_pose.y + sample.eps_Y,
                       wrap_angle(true_pose.theta + sample.eps_theta)};
  const NavState nav = to_nav_state(corrupted, goal);
  return MeasuredNavState{nav.rho, nav.alpha, nav.beta, corrupted.theta};
}

}  // namespace ddstab
