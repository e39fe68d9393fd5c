#pragma once

// Closed-loop episode execution (measure -> control -> actuate with noise ->
// propagate) and Monte-Carlo / ring campaigns.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ddstab/controller.hpp"
#include "ddstab/kinematics.hpp"
#include "ddstab/lyapunov.hpp"
#include "ddstab/noise.hpp"
#include "ddstab/types.hpp"

namespace ddstab {

// TWO_REGIME is the full switched law; GLOBAL_ONLY applies the global law
// everywhere (the comparison baseline whose heading never settles under
// noise).
enum class LawVariant { TWO_REGIME, GLOBAL_ONLY };

inline const char* to_string(LawVariant v) {
  return v == LawVariant::TWO_REGIME ? "two-regime" : "global-only";
}

struct SimConfig {
  Pose start_pose{};
  Pose goal_pose{};
  double Ts = 0.1;                 // [s] control period
  int max_steps = 6000;
  double rho_tol = 1e-5;           // [m] arrival distance tolerance
  double theta_tol = 1e-3;         // [rad] arrival heading tolerance (LOCAL regime)
  double arrival_pos_tol = 1.0;    // [m] success margin for noisy campaigns
  double arrival_theta_tol = 0.5;  // [rad] success margin for noisy campaigns
  ControllerParams controller{};
  NoiseBounds bounds{};            // all-zero bounds: noise-free run
  std::uint64_t seed = 1;
  LawVariant law_variant = LawVariant::TWO_REGIME;
  bool record_trajectory = true;
};

// Materializes derived defaults (currently the switch radius) and validates.
inline SimConfig resolve_config(SimConfig c) {
  c.start_pose.theta = wrap_angle(c.start_pose.theta);
  c.goal_pose.theta = wrap_angle(c.goal_pose.theta);
  if (!(c.Ts > 0.0)) {
    throw std::invalid_argument("SimConfig: Ts must be > 0");
  }
  if (c.max_steps < 1) {
    throw std::invalid_argument("SimConfig: max_steps must be >= 1");
  }
  if (!(c.rho_tol > 0.0)) {
    throw std::invalid_argument("SimConfig: rho_tol must be > 0");
  }
  if (!(c.theta_tol > 0.0)) {
    throw std::invalid_argument("SimConfig: theta_tol must be > 0");
  }
  if (!(c.arrival_pos_tol > 0.0) || !(c.arrival_theta_tol > 0.0)) {
    throw std::invalid_argument("SimConfig: arrival tolerances must be > 0");
  }
  if (!is_finite(c.start_pose) || !is_finite(c.goal_pose)) {
    throw std::invalid_argument("SimConfig: non-finite pose");
  }
  validate_bounds(c.bounds);
  if (std::isnan(c.controller.eps_P)) {
    c.controller.eps_P = resolve_switch_radius(c.bounds, c.controller.gamma, c.rho_tol);
  }
  validate_params(c.controller, c.bounds);
  return c;
}

// One logged closed-loop step: the state the controller acted on, what it
// measured, what it commanded, and the energy bookkeeping for that step.
struct TrajectoryPoint {
  int step = 0;
  Pose pose{};             // true pose before the step
  NavState nav{};          // true navigation state before the step
  MeasuredNavState meas{};
  VelocityCommand cmd{};   // commanded (branch-signed magnitude, see docs)
  Regime regime = Regime::GLOBAL;
  double V = 0.0;          // regime energy at the pre-step true state
  double dV = 0.0;         // exact energy change over the step
};

struct EpisodeResult {
  std::vector<TrajectoryPoint> trajectory;  // empty when recording is off
  Pose final_pose{};
  std::array<double, 3> final_errors{};     // |x-Xd|, |y-Yd|, |wrap(theta-theta_d)|
  double final_rho = 0.0;                   // [m] final distance to goal
  int steps_used = 0;
  bool converged = false;  // final rho <= rho_tol
  bool arrived = false;    // within the arrival tolerances and not aborted
  bool aborted = false;    // non-finite state encountered
  double max_abs_v = 0.0;  // largest |v| commanded over the episode
  std::uint64_t seed = 0;
  SimConfig config{};      // resolved configuration the episode actually ran
};

namespace detail {

// Arrival test on the true state. The heading tolerance participates only
// once the controller has handed off to the local regime; the global law
// stabilizes position alone, so a global-regime episode (including the
// GLOBAL_ONLY variant) finishes on distance.
inline bool arrival_reached(double rho, double theta_err, Regime regime,
                            const SimConfig& c) {
  if (rho > c.rho_tol) {
    return false;
  }
  return regime == Regime::GLOBAL || std::abs(theta_err) <= c.theta_tol;
}

}  // namespace detail

inline EpisodeResult run_episode(const SimConfig& config_in) {
  const SimConfig config = resolve_config(config_in);
  EpisodeResult result;
  result.seed = config.seed;
  result.config = config;

  NoiseStream stream(config.seed);
  ControllerState ctrl{Regime::GLOBAL, config.controller};
  Pose pose = config.start_pose;
  int step = 0;

  while (true) {
    const NavState nav = to_nav_state(pose, config.goal_pose);
    const double theta_err = wrap_angle(pose.theta - config.goal_pose.theta);
    const Regime effective_regime =
        config.law_variant == LawVariant::GLOBAL_ONLY ? Regime::GLOBAL : ctrl.regime;
    if (detail::arrival_reached(nav.rho, theta_err, effective_regime, config)) {
      break;
    }
    if (step >= config.max_steps) {
      break;
    }

    const NoiseSample sample = draw_sample(config.bounds, stream);
    const MeasuredNavState meas = measure(pose, config.goal_pose, sample);

    VelocityCommand cmd;
    Regime regime;
    const AlphaBranch branch = classify_alpha(meas.alpha_m);
    if (config.law_variant == LawVariant::GLOBAL_ONLY) {
      cmd = global_law(meas, config.controller, branch);
      regime = Regime::GLOBAL;
    } else {
      auto [c, r] = compute_command(ctrl, meas);
      cmd = c;
      regime = r;
      ctrl.regime = regime;
    }

    // Actuate: the plant sees the noisy command; a BACKWARD-branch command
    // carries a goal-closing magnitude whose Cartesian velocity is negative
    // (reverse gear).
    const double v_act = cmd.v + sample.eps_v;
    const double v_cart = branch == AlphaBranch::FORWARD ? v_act : -v_act;
    const Pose next =
        cartesian_step(pose, VelocityCommand{v_cart, cmd.omega + sample.eps_omega},
                       config.Ts);

    result.max_abs_v = std::max(result.max_abs_v, std::abs(cmd.v));
    if (config.record_trajectory) {
      const double V = regime == Regime::GLOBAL ? V_global(nav, config.controller.h)
                                                : V_local(nav);
      double dV = 0.0;
      if (is_finite(next)) {
        dV = delta_V(nav, to_nav_state(next, config.goal_pose), regime,
                     config.controller.h)
                 .exact;
      }
      result.trajectory.push_back(
          TrajectoryPoint{step, pose, nav, meas, cmd, regime, V, dV});
    }

    ++step;
    if (!is_finite(next)) {
      result.aborted = true;
      break;
    }
    pose = next;
  }

  const NavState final_nav = to_nav_state(pose, config.goal_pose);
  result.final_pose = pose;
  result.final_rho = final_nav.rho;
  result.final_errors = {std::abs(pose.x - config.goal_pose.x),
                         std::abs(pose.y - config.goal_pose.y),
                         std::abs(wrap_angle(pose.theta - config.goal_pose.theta))};
  result.steps_used = step;
  result.converged = !result.aborted && final_nav.rho <= config.rho_tol;
  result.arrived = !result.aborted && final_nav.rho <= config.arrival_pos_tol &&
                   result.final_errors[2] <= config.arrival_theta_tol;
  return result;
}

struct ErrorStats {
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;
};

inline ErrorStats compute_stats(std::vector<double> values) {
  ErrorStats s;
  if (values.empty()) {
    return s;
  }
  std::sort(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  const std::size_t n = values.size();
  s.median = n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.max = values.back();
  return s;
}

// Per-run digest kept by a campaign (trajectories are not retained).
struct RunRecord {
  std::uint64_t seed = 0;
  double final_rho = 0.0;
  double final_abs_theta = 0.0;
  int steps_used = 0;
  bool converged = false;
  bool arrived = false;
  bool aborted = false;
};

struct MonteCarloSummary {
  int runs = 0;
  double success_rate = 0.0;        // fraction of runs that arrived
  ErrorStats final_rho{};           // over non-aborted runs
  ErrorStats final_abs_theta{};     // over non-aborted runs
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> run_seeds;
  std::vector<RunRecord> run_records;
  int aborted_runs = 0;
  double max_abs_v = 0.0;
};

// Runs `runs` episodes with independent streams seeded from
// (config.seed, run index); deterministic reduction in run order. Aborted
// episodes are recorded, not fatal.
inline MonteCarloSummary run_monte_carlo(const SimConfig& config_in, int runs) {
  if (runs < 1) {
    throw std::invalid_argument("run_monte_carlo: runs must be >= 1");
  }
  const SimConfig config = resolve_config(config_in);
  MonteCarloSummary summary;
  summary.runs = runs;
  summary.master_seed = config.seed;

  std::vector<double> rhos;
  std::vector<double> thetas;
  int arrived_count = 0;
  for (int i = 0; i < runs; ++i) {
    SimConfig run_config = config;
    run_config.seed = derive_run_seed(config.seed, static_cast<std::uint64_t>(i));
    run_config.record_trajectory = false;
    const EpisodeResult r = run_episode(run_config);

    summary.run_seeds.push_back(run_config.seed);
    summary.run_records.push_back(RunRecord{run_config.seed, r.final_rho,
                                            r.final_errors[2], r.steps_used, r.converged,
                                            r.arrived, r.aborted});
    summary.max_abs_v = std::max(summary.max_abs_v, r.max_abs_v);
    if (r.aborted) {
      ++summary.aborted_runs;
      continue;
    }
    rhos.push_back(r.final_rho);
    thetas.push_back(r.final_errors[2]);
    if (r.arrived) {
      ++arrived_count;
    }
  }
  summary.success_rate = static_cast<double>(arrived_count) / static_cast<double>(runs);
  summary.final_rho = compute_stats(std::move(rhos));
  summary.final_abs_theta = compute_stats(std::move(thetas));
  return summary;
}

// Runs one episode from each of n_starts points spaced uniformly on the
// circle of the given radius around the goal, all with the same heading.
// Each episode gets its own stream derived from the template seed.
inline std::vector<EpisodeResult> ring_experiment(double radius, int n_starts,
                                                  double start_heading,
                                                  const SimConfig& template_config) {
  if (!(radius > 0.0)) {
    throw std::invalid_argument("ring_experiment: radius must be > 0");
  }
  if (n_starts < 1) {
    throw std::invalid_argument("ring_experiment: n_starts must be >= 1");
  }
  const SimConfig base = resolve_config(template_config);
  std::vector<EpisodeResult> results;
  results.reserve(static_cast<std::size_t>(n_starts));
  for (int j = 0; j < n_starts; ++j) {
    const double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n_starts);
    SimConfig c = base;
    c.start_pose = make_pose(base.goal_pose.x + radius * std::cos(phi),
                             base.goal_pose.y + radius * std::sin(phi), start_heading);
    c.seed = derive_run_seed(base.seed, static_cast<std::uint64_t>(j));
    results.push_back(run_episode(c));
  }
  return results;
}

}  // namespace ddstab
