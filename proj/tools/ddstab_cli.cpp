// Batch front-end for the differential-drive stabilization library: single
// episodes, Monte-Carlo campaigns, ring-of-starts experiments, and energy
// trace analysis. Every experiment writes its fully-resolved configuration
// next to its outputs so any result can be reproduced from artifacts alone.
//
// Exit codes: 0 all experiments arrived, 2 at least one did not (or aborted),
// 3 configuration / CLI / I/O error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddstab/config.hpp"
#include "ddstab/io.hpp"
#include "ddstab/simulation.hpp"

namespace fs = std::filesystem;
using namespace ddstab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotArrived = 2;
constexpr int kExitConfigError = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::string law;     // "", "two-regime", "global-only"
  std::optional<int> runs;
  std::optional<double> ring_radius;
  std::optional<int> ring_starts;
  std::optional<std::string> ring_heading;  // angle token, deg suffix allowed
  std::string format = "csv";
};

double parse_heading(const std::string& token) {
  try {
    return wrap_angle(detail::parse_angle(token, 0, "heading"));
  } catch (const ConfigError&) {
    throw std::runtime_error("--heading: expected an angle in radians or with a deg "
                             "suffix (e.g. 220deg), got '" + token + "'");
  }
}

// Built-in experiment: the reference start used throughout the docs, with the
// reference noise bounds and all defaults materialized.
ExperimentSpec default_spec(ExperimentMode mode, const std::string& name) {
  ExperimentSpec spec;
  spec.name = name;
  spec.mode = mode;
  SimConfig sim;
  sim.start_pose = make_pose(-2.0, -5.5, 30.0 * kPi / 180.0);
  sim.goal_pose = Pose{0, 0, 0};
  sim.bounds = reference_noise_bounds();
  spec.sim = resolve_config(sim);
  return spec;
}

void apply_overrides(ExperimentSpec& spec, const Overrides& o) {
  if (o.seed) {
    spec.sim.seed = *o.seed;
  }
  if (o.out_dir) {
    spec.out_dir = *o.out_dir;
  }
  if (o.law == "two-regime") {
    spec.sim.law_variant = LawVariant::TWO_REGIME;
  } else if (o.law == "global-only") {
    spec.sim.law_variant = LawVariant::GLOBAL_ONLY;
  }
  if (o.runs) {
    spec.runs = *o.runs;
  }
  if (o.ring_radius) {
    spec.ring_radius = *o.ring_radius;
  }
  if (o.ring_starts) {
    spec.ring_starts = *o.ring_starts;
  }
  if (o.ring_heading) {
    spec.ring_heading = parse_heading(*o.ring_heading);
  }
}

// Experiments to execute for one verb: the matching-mode entries of the batch
// file, or the built-in default when no file is given.
std::vector<ExperimentSpec> load_specs(const std::string& config_path, ExperimentMode mode,
                                       const char* default_name, const Overrides& o) {
  std::vector<ExperimentSpec> specs;
  if (config_path.empty()) {
    specs.push_back(default_spec(mode, default_name));
  } else {
    for (ExperimentSpec& s : parse_config(read_text_file(config_path))) {
      if (s.mode == mode) {
        specs.push_back(std::move(s));
      }
    }
    if (specs.empty()) {
      throw std::runtime_error(config_path + ": no experiment with mode '" +
                               std::string(to_string(mode)) + "'");
    }
  }
  for (ExperimentSpec& s : specs) {
    apply_overrides(s, o);
  }
  return specs;
}

fs::path ensure_out_dir(const ExperimentSpec& spec) {
  const fs::path dir(spec.out_dir);
  if (!dir.empty()) {
    fs::create_directories(dir);
  }
  return dir;
}

int count_backward_steps(const EpisodeResult& r) {
  int n = 0;
  for (const TrajectoryPoint& p : r.trajectory) {
    if (std::abs(p.meas.alpha_m) >= kPi / 2) {
      ++n;
    }
  }
  return n;
}

int first_local_step(const EpisodeResult& r) {
  for (const TrajectoryPoint& p : r.trajectory) {
    if (p.regime == Regime::LOCAL) {
      return p.step;
    }
  }
  return -1;
}

void print_episode(const std::string& label, const EpisodeResult& r) {
  const char* status = r.aborted ? "ABORTED" : (r.arrived ? "arrived" : "not arrived");
  std::printf(
      "%-16s steps %5d  final pose (%.6g, %.6g, %.6g)  rho %.6g m  |theta| %.6g rad  "
      "max|v| %.4g  %s\n",
      label.c_str(), r.steps_used, r.final_pose.x, r.final_pose.y, r.final_pose.theta,
      r.final_rho, r.final_errors[2], r.max_abs_v, status);
}

int do_run(const std::string& config_path, const Overrides& o) {
  int exit_code = kExitOk;
  for (ExperimentSpec& spec : load_specs(config_path, ExperimentMode::SINGLE, "run", o)) {
    const fs::path dir = ensure_out_dir(spec);
    const EpisodeResult r = run_episode(spec.sim);
    spec.sim = r.config;  // resolved values the episode actually used

    const std::string csv_name = spec.name + ".csv";
    write_text_file((dir / csv_name).string(), trajectory_csv(r));
    if (o.format == "json") {
      write_text_file((dir / (spec.name + ".json")).string(),
                      trajectory_json(r).dump(2) + "\n");
    }
    write_text_file((dir / (spec.name + ".resolved.cfg")).string(),
                    emit_resolved_config(spec));
    write_text_file((dir / ("plot_" + spec.name + ".py")).string(),
                    plot_script(csv_name));

    print_episode(spec.name, r);
    const int sw = first_local_step(r);
    if (sw >= 0) {
      std::printf("%-16s local handoff at step %d\n", "", sw);
    }
    std::printf("%-16s outputs in %s\n", "", dir.empty() ? "." : dir.string().c_str());
    if (!r.arrived) {
      exit_code = kExitNotArrived;
    }
  }
  return exit_code;
}

int do_mc(const std::string& config_path, const Overrides& o) {
  int exit_code = kExitOk;
  for (ExperimentSpec& spec :
       load_specs(config_path, ExperimentMode::MONTE_CARLO, "mc", o)) {
    const fs::path dir = ensure_out_dir(spec);
    const MonteCarloSummary s = run_monte_carlo(spec.sim, spec.runs);
    spec.sim = resolve_config(spec.sim);

    write_text_file((dir / (spec.name + ".summary.json")).string(),
                    summary_json(s).dump(2) + "\n");
    write_text_file((dir / (spec.name + ".summary.txt")).string(), summary_table(s));
    write_text_file((dir / (spec.name + ".resolved.cfg")).string(),
                    emit_resolved_config(spec));

    std::printf("[%s]\n", spec.name.c_str());
    std::fputs(summary_table(s).c_str(), stdout);
    std::printf("  outputs in %s\n", dir.empty() ? "." : dir.string().c_str());
    if (s.success_rate != 1.0 || s.aborted_runs != 0) {
      exit_code = kExitNotArrived;
    }
  }
  return exit_code;
}

int do_ring(const std::string& config_path, const Overrides& o) {
  int exit_code = kExitOk;
  for (ExperimentSpec& spec : load_specs(config_path, ExperimentMode::RING, "ring", o)) {
    const fs::path dir = ensure_out_dir(spec);
    const std::vector<EpisodeResult> results =
        ring_experiment(spec.ring_radius, spec.ring_starts, spec.ring_heading, spec.sim);
    spec.sim = resolve_config(spec.sim);

    bool all_arrived = true;
    int backward_total = 0;
    nlohmann::json episodes = nlohmann::json::array();
    for (std::size_t j = 0; j < results.size(); ++j) {
      const EpisodeResult& r = results[j];
      char idx[8];
      std::snprintf(idx, sizeof(idx), "%02zu", j);
      const std::string episode_name = spec.name + "_" + idx;
      write_text_file((dir / (episode_name + ".csv")).string(), trajectory_csv(r));

      const int backward = count_backward_steps(r);
      backward_total += backward;
      all_arrived = all_arrived && r.arrived;
      episodes.push_back(nlohmann::json{
          {"index", j},
          {"start",
           {{"x", r.config.start_pose.x},
            {"y", r.config.start_pose.y},
            {"theta", r.config.start_pose.theta}}},
          {"seed", r.seed},
          {"final_rho", r.final_rho},
          {"final_abs_theta", r.final_errors[2]},
          {"steps_used", r.steps_used},
          {"converged", r.converged},
          {"arrived", r.arrived},
          {"aborted", r.aborted},
          {"backward_steps", backward},
          {"switch_step", first_local_step(r)},
          {"max_abs_v", r.max_abs_v}});
      print_episode(episode_name, r);
    }

    const nlohmann::json ring_summary{{"radius", spec.ring_radius},
                                      {"starts", spec.ring_starts},
                                      {"heading", spec.ring_heading},
                                      {"master_seed", spec.sim.seed},
                                      {"all_arrived", all_arrived},
                                      {"backward_steps_total", backward_total},
                                      {"episodes", episodes}};
    write_text_file((dir / (spec.name + ".ring.json")).string(),
                    ring_summary.dump(2) + "\n");
    write_text_file((dir / (spec.name + ".resolved.cfg")).string(),
                    emit_resolved_config(spec));
    write_text_file((dir / ("plot_" + spec.name + ".py")).string(),
                    plot_script(spec.name + "_00.csv"));

    std::printf("%-16s %s, %d backward-branch steps, outputs in %s\n", spec.name.c_str(),
                all_arrived ? "all arrived" : "NOT all arrived", backward_total,
                dir.empty() ? "." : dir.string().c_str());
    if (!all_arrived) {
      exit_code = kExitNotArrived;
    }
  }
  return exit_code;
}

int do_analyze(const std::string& input, const std::optional<std::string>& out_dir) {
  const TraceReport rep = analyze_trajectory_csv(read_text_file(input));
  std::fputs(report_text(rep).c_str(), stdout);

  const fs::path in(input);
  const fs::path dir = out_dir ? fs::path(*out_dir) : in.parent_path();
  if (!dir.empty()) {
    fs::create_directories(dir);
  }
  const fs::path report_path = dir / (in.stem().string() + ".report.json");
  write_text_file(report_path.string(), report_json(rep).dump(2) + "\n");
  std::printf("report written to %s\n", report_path.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop stabilization experiments for a differential-drive robot"};
  app.require_subcommand(1);

  Overrides o;
  std::string config_path;
  std::string analyze_input;
  std::optional<std::string> analyze_out;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Batch config file; runs its matching-mode "
                                             "experiments instead of the built-in one");
    cmd->add_option("--out", o.out_dir, "Output directory (overrides the config)");
    cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
    cmd->add_option("--law", o.law, "Control law variant")
        ->check(CLI::IsMember({"two-regime", "global-only"}));
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Single closed-loop episodes");
  add_common(run_cmd);
  run_cmd->add_option("--format", o.format, "Trajectory format: csv, or json to add a "
                                            "full-episode JSON next to the CSV")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* mc_cmd = app.add_subcommand("mc", "Monte-Carlo campaigns");
  add_common(mc_cmd);
  mc_cmd->add_option("--runs", o.runs, "Number of episodes per campaign");

  CLI::App* ring_cmd = app.add_subcommand("ring", "Ring-of-starts campaigns");
  add_common(ring_cmd);
  ring_cmd->add_option("--radius", o.ring_radius, "Ring radius around the goal [m]")
      ->check(CLI::PositiveNumber);
  ring_cmd->add_option("--starts", o.ring_starts, "Number of start points on the ring")
      ->check(CLI::PositiveNumber);
  ring_cmd->add_option("--heading", o.ring_heading,
                       "Start heading (radians, or e.g. 220deg)");

  CLI::App* an_cmd = app.add_subcommand("analyze", "Energy trace report from a "
                                                   "trajectory CSV");
  an_cmd->add_option("input", analyze_input, "Trajectory CSV file")->required();
  an_cmd->add_option("--out", analyze_out, "Directory for the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    app.exit(e);
    return kExitConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      return do_run(config_path, o);
    }
    if (mc_cmd->parsed()) {
      return do_mc(config_path, o);
    }
    if (ring_cmd->parsed()) {
      return do_ring(config_path, o);
    }
    return do_analyze(analyze_input, analyze_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfigError;
  }
}
