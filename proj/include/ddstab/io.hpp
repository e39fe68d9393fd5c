#pragma once

// Serialization of episode results and campaign summaries (CSV, JSON, plot
// scripts) and trace analysis of a trajectory CSV.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddstab/config.hpp"
#include "ddstab/simulation.hpp"

namespace ddstab {

enum class TrajectoryFormat { CSV, JSON };

inline constexpr const char* kCsvHeader =
    "step,t,x,y,theta,rho,alpha,beta,rho_m,alpha_m,beta_m,v,omega,regime,V,dV";

namespace detail {

// Fixed-width-free compact float formatting: 9 significant digits.
inline void append_g9(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  out += buf;
}

}  // namespace detail

inline std::string trajectory_csv(const EpisodeResult& result) {
  std::string out(kCsvHeader);
  out += '\n';
  const double Ts = result.config.Ts;
  for (const TrajectoryPoint& p : result.trajectory) {
    out += std::to_string(p.step);
    out += ',';
    detail::append_g9(out, static_cast<double>(p.step) * Ts);
    for (double v : {p.pose.x, p.pose.y, p.pose.theta, p.nav.rho, p.nav.alpha,
                     p.nav.beta, p.meas.rho_m, p.meas.alpha_m, p.meas.beta_m, p.cmd.v,
                     p.cmd.omega}) {
      out += ',';
      detail::append_g9(out, v);
    }
    out += ',';
    out += to_string(p.regime);
    out += ',';
    detail::append_g9(out, p.V);
    out += ',';
    detail::append_g9(out, p.dV);
    out += '\n';
  }
  return out;
}

inline nlohmann::json config_json(const SimConfig& c) {
  return nlohmann::json{
      {"start_pose", {{"x", c.start_pose.x}, {"y", c.start_pose.y}, {"theta", c.start_pose.theta}}},
      {"goal_pose", {{"x", c.goal_pose.x}, {"y", c.goal_pose.y}, {"theta", c.goal_pose.theta}}},
      {"Ts", c.Ts},
      {"max_steps", c.max_steps},
      {"rho_tol", c.rho_tol},
      {"theta_tol", c.theta_tol},
      {"arrival_pos_tol", c.arrival_pos_tol},
      {"arrival_theta_tol", c.arrival_theta_tol},
      {"controller",
       {{"gamma", c.controller.gamma},
        {"k", c.controller.k},
        {"h", c.controller.h},
        {"k2", c.controller.k2},
        {"eps_P", c.controller.eps_P}}},
      {"bounds",
       {{"eps_X_max", c.bounds.eps_X_max},
        {"eps_Y_max", c.bounds.eps_Y_max},
        {"eps_theta_max", c.bounds.eps_theta_max},
        {"eps_v_max", c.bounds.eps_v_max},
        {"eps_omega_max", c.bounds.eps_omega_max}}},
      {"seed", c.seed},
      {"law_variant", to_string(c.law_variant)},
      {"record_trajectory", c.record_trajectory}};
}

inline SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig c;
  c.start_pose = Pose{j.at("start_pose").at("x"), j.at("start_pose").at("y"),
                      j.at("start_pose").at("theta")};
  c.goal_pose = Pose{j.at("goal_pose").at("x"), j.at("goal_pose").at("y"),
                     j.at("goal_pose").at("theta")};
  c.Ts = j.at("Ts");
  c.max_steps = j.at("max_steps");
  c.rho_tol = j.at("rho_tol");
  c.theta_tol = j.at("theta_tol");
  c.arrival_pos_tol = j.at("arrival_pos_tol");
  c.arrival_theta_tol = j.at("arrival_theta_tol");
  const auto& ctl = j.at("controller");
  c.controller = ControllerParams{ctl.at("gamma"), ctl.at("k"), ctl.at("h"),
                                  ctl.at("k2"), ctl.at("eps_P")};
  const auto& b = j.at("bounds");
  c.bounds = NoiseBounds{b.at("eps_X_max"), b.at("eps_Y_max"), b.at("eps_theta_max"),
                         b.at("eps_v_max"), b.at("eps_omega_max")};
  c.seed = j.at("seed");
  c.law_variant = j.at("law_variant") == "global-only" ? LawVariant::GLOBAL_ONLY
                                                       : LawVariant::TWO_REGIME;
  c.record_trajectory = j.at("record_trajectory");
  return c;
}

inline nlohmann::json trajectory_json(const EpisodeResult& r) {
  nlohmann::json steps = nlohmann::json::array();
  for (const TrajectoryPoint& p : r.trajectory) {
    steps.push_back(nlohmann::json{{"step", p.step},
                                   {"x", p.pose.x},
                                   {"y", p.pose.y},
                                   {"theta", p.pose.theta},
                                   {"rho", p.nav.rho},
                                   {"alpha", p.nav.alpha},
                                   {"beta", p.nav.beta},
                                   {"rho_m", p.meas.rho_m},
                                   {"alpha_m", p.meas.alpha_m},
                                   {"beta_m", p.meas.beta_m},
                                   {"theta_m", p.meas.theta_m},
                                   {"v", p.cmd.v},
                                   {"omega", p.cmd.omega},
                                   {"regime", to_string(p.regime)},
                                   {"V", p.V},
                                   {"dV", p.dV}});
  }
  return nlohmann::json{
      {"config", config_json(r.config)},
      {"final_pose",
       {{"x", r.final_pose.x}, {"y", r.final_pose.y}, {"theta", r.final_pose.theta}}},
      {"final_errors", {r.final_errors[0], r.final_errors[1], r.final_errors[2]}},
      {"final_rho", r.final_rho},
      {"steps_used", r.steps_used},
      {"converged", r.converged},
      {"arrived", r.arrived},
      {"aborted", r.aborted},
      {"max_abs_v", r.max_abs_v},
      {"seed", r.seed},
      {"trajectory", steps}};
}

inline EpisodeResult episode_from_json(const nlohmann::json& j) {
  EpisodeResult r;
  r.config = config_from_json(j.at("config"));
  r.final_pose = Pose{j.at("final_pose").at("x"), j.at("final_pose").at("y"),
                      j.at("final_pose").at("theta")};
  const auto& fe = j.at("final_errors");
  r.final_errors = {fe.at(0), fe.at(1), fe.at(2)};
  r.final_rho = j.at("final_rho");
  r.steps_used = j.at("steps_used");
  r.converged = j.at("converged");
  r.arrived = j.at("arrived");
  r.aborted = j.at("aborted");
  r.max_abs_v = j.at("max_abs_v");
  r.seed = j.at("seed");
  for (const auto& s : j.at("trajectory")) {
    TrajectoryPoint p;
    p.step = s.at("step");
    p.pose = Pose{s.at("x"), s.at("y"), s.at("theta")};
    p.nav = NavState{s.at("rho"), s.at("alpha"), s.at("beta")};
    p.meas = MeasuredNavState{s.at("rho_m"), s.at("alpha_m"), s.at("beta_m"),
                              s.at("theta_m")};
    p.cmd = VelocityCommand{s.at("v"), s.at("omega")};
    p.regime = s.at("regime") == "LOCAL" ? Regime::LOCAL : Regime::GLOBAL;
    p.V = s.at("V");
    p.dV = s.at("dV");
    r.trajectory.push_back(p);
  }
  return r;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes the trajectory in the requested format; CSV columns are fixed and
// floats carry 9 significant digits.
inline void emit_trajectory(const EpisodeResult& result, TrajectoryFormat format,
                            const std::string& path) {
  if (format == TrajectoryFormat::CSV) {
    write_text_file(path, trajectory_csv(result));
  } else {
    write_text_file(path, trajectory_json(result).dump(2) + "\n");
  }
}

inline nlohmann::json summary_json(const MonteCarloSummary& s) {
  nlohmann::json records = nlohmann::json::array();
  for (const RunRecord& r : s.run_records) {
    records.push_back(nlohmann::json{{"seed", r.seed},
                                     {"final_rho", r.final_rho},
                                     {"final_abs_theta", r.final_abs_theta},
                                     {"steps_used", r.steps_used},
                                     {"converged", r.converged},
                                     {"arrived", r.arrived},
                                     {"aborted", r.aborted}});
  }
  return nlohmann::json{{"runs", s.runs},
                        {"success_rate", s.success_rate},
                        {"master_seed", s.master_seed},
                        {"aborted_runs", s.aborted_runs},
                        {"max_abs_v", s.max_abs_v},
                        {"statistics",
                         {{"final_rho",
                           {{"mean", s.final_rho.mean},
                            {"median", s.final_rho.median},
                            {"max", s.final_rho.max}}},
                          {"final_abs_theta",
                           {{"mean", s.final_abs_theta.mean},
                            {"median", s.final_abs_theta.median},
                            {"max", s.final_abs_theta.max}}}}},
                        {"run_seeds", s.run_seeds},
                        {"runs_detail", records}};
}

// Human-readable campaign table.
inline std::string summary_table(const MonteCarloSummary& s) {
  char buf[512];
  std::string out;
  out += "campaign summary\n";
  std::snprintf(buf, sizeof(buf), "  runs          %d\n", s.runs);
  out += buf;
  std::snprintf(buf, sizeof(buf), "  master seed   %llu\n",
                static_cast<unsigned long long>(s.master_seed));
  out += buf;
  std::snprintf(buf, sizeof(buf), "  success rate  %.4f\n", s.success_rate);
  out += buf;
  std::snprintf(buf, sizeof(buf), "  aborted runs  %d\n", s.aborted_runs);
  out += buf;
  std::snprintf(buf, sizeof(buf), "  max |v|       %.6g m/s\n", s.max_abs_v);
  out += buf;
  out += "  final errors            mean      median         max\n";
  std::snprintf(buf, sizeof(buf), "    rho      [m]    %10.4g  %10.4g  %10.4g\n",
                s.final_rho.mean, s.final_rho.median, s.final_rho.max);
  out += buf;
  std::snprintf(buf, sizeof(buf), "    |theta|  [rad]  %10.4g  %10.4g  %10.4g\n",
                s.final_abs_theta.mean, s.final_abs_theta.median, s.final_abs_theta.max);
  out += buf;
  return out;
}

// Per-regime energy-trace digest of a trajectory CSV.
struct TraceReport {
  int steps = 0;
  int global_steps = 0;
  int local_steps = 0;
  int switch_step = -1;        // first LOCAL step, -1 when never local
  bool latched = true;         // no LOCAL -> GLOBAL reversal observed
  int positive_dV_global = 0;  // steps with exact dV > 0 (noise-induced)
  int positive_dV_local = 0;
  double max_dV = 0.0;
  double min_dV = 0.0;
  double V_first = 0.0;
  double V_last = 0.0;
  double final_rho = 0.0;
  double final_theta = 0.0;  // [rad] absolute heading at the last step
  double max_abs_v = 0.0;
};

inline TraceReport analyze_trajectory_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::runtime_error("unrecognized trajectory CSV header");
  }
  TraceReport rep;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() != 16) {
      throw std::runtime_error("malformed trajectory CSV row: " + line);
    }
    const double theta = std::strtod(cells[4].c_str(), nullptr);
    const double rho = std::strtod(cells[5].c_str(), nullptr);
    const double v = std::strtod(cells[11].c_str(), nullptr);
    const std::string& regime = cells[13];
    const double V = std::strtod(cells[14].c_str(), nullptr);
    const double dV = std::strtod(cells[15].c_str(), nullptr);

    if (first) {
      rep.V_first = V;
      rep.max_dV = dV;
      rep.min_dV = dV;
      first = false;
    }
    if (regime == "LOCAL") {
      if (rep.switch_step < 0) {
        rep.switch_step = rep.steps;
      }
      ++rep.local_steps;
      if (dV > 0.0) {
        ++rep.positive_dV_local;
      }
    } else if (regime == "GLOBAL") {
      if (rep.switch_step >= 0) {
        rep.latched = false;
      }
      ++rep.global_steps;
      if (dV > 0.0) {
        ++rep.positive_dV_global;
      }
    } else {
      throw std::runtime_error("unknown regime tag in CSV: " + regime);
    }
    rep.max_dV = std::max(rep.max_dV, dV);
    rep.min_dV = std::min(rep.min_dV, dV);
    rep.max_abs_v = std::max(rep.max_abs_v, std::abs(v));
    rep.V_last = V;
    rep.final_rho = rho;
    rep.final_theta = theta;
    ++rep.steps;
  }
  return rep;
}

inline nlohmann::json report_json(const TraceReport& r) {
  return nlohmann::json{{"steps", r.steps},
                        {"global_steps", r.global_steps},
                        {"local_steps", r.local_steps},
                        {"switch_step", r.switch_step},
                        {"latched", r.latched},
                        {"positive_dV_global", r.positive_dV_global},
                        {"positive_dV_local", r.positive_dV_local},
                        {"max_dV", r.max_dV},
                        {"min_dV", r.min_dV},
                        {"V_first", r.V_first},
                        {"V_last", r.V_last},
                        {"final_rho", r.final_rho},
                        {"final_theta", r.final_theta},
                        {"max_abs_v", r.max_abs_v}};
}

inline std::string report_text(const TraceReport& r) {
  std::ostringstream out;
  out << "energy trace report\n"
      << "  steps            " << r.steps << " (global " << r.global_steps << ", local "
      << r.local_steps << ")\n"
      << "  switch step      " << r.switch_step << "\n"
      << "  regime latched   " << (r.latched ? "yes" : "no") << "\n"
      << "  dV > 0 steps     global " << r.positive_dV_global << ", local "
      << r.positive_dV_local << "\n"
      << "  dV range         [" << r.min_dV << ", " << r.max_dV << "]\n"
      << "  V first/last     " << r.V_first << " / " << r.V_last << "\n"
      << "  final rho        " << r.final_rho << " m\n"
      << "  final heading    " << r.final_theta << " rad\n"
      << "  max |v|          " << r.max_abs_v << " m/s\n";
  return out.str();
}

// Self-contained matplotlib script plotting one trajectory CSV: path plot,
// x/y/theta vs t, and v/omega vs t panels.
inline std::string plot_script(const std::string& csv_filename) {
  std::string s;
  s += "#!/usr/bin/env python3\n";
  s += "\"\"\"Plot the trajectory CSV written next to this script.\"\"\"\n";
  s += "import csv\n";
  s += "import os\n";
  s += "import sys\n";
  s += "\n";
  s += "import matplotlib\n";
  s += "matplotlib.use(\"Agg\")\n";
  s += "import matplotlib.pyplot as plt\n";
  s += "\n";
  s += "HERE = os.path.dirname(os.path.abspath(__file__))\n";
  s += "CSV = sys.argv[1] if len(sys.argv) > 1 else os.path.join(HERE, \"" +
       csv_filename + "\")\n";
  s += "cols = {}\n";
  s += "with open(CSV) as f:\n";
  s += "    rows = list(csv.DictReader(f))\n";
  s += "for key in rows[0]:\n";
  s += "    if key != \"regime\":\n";
  s += "        cols[key] = [float(r[key]) for r in rows]\n";
  s += "local = [r[\"regime\"] == \"LOCAL\" for r in rows]\n";
  s += "fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))\n";
  s += "ax = axes[0]\n";
  s += "ax.plot(cols[\"x\"], cols[\"y\"], lw=1.2)\n";
  s += "ax.plot(cols[\"x\"][0], cols[\"y\"][0], \"go\", label=\"start\")\n";
  s += "ax.plot(0, 0, \"r*\", ms=12, label=\"goal\")\n";
  s += "if any(local):\n";
  s += "    i = local.index(True)\n";
  s += "    ax.plot(cols[\"x\"][i], cols[\"y\"][i], \"ks\", ms=5, label=\"switch\")\n";
  s += "ax.set_xlabel(\"x [m]\"); ax.set_ylabel(\"y [m]\"); ax.axis(\"equal\")\n";
  s += "ax.legend(); ax.set_title(\"path\")\n";
  s += "ax = axes[1]\n";
  s += "ax.plot(cols[\"t\"], cols[\"x\"], label=\"x [m]\")\n";
  s += "ax.plot(cols[\"t\"], cols[\"y\"], label=\"y [m]\")\n";
  s += "ax.plot(cols[\"t\"], cols[\"theta\"], label=\"theta [rad]\")\n";
  s += "ax.set_xlabel(\"t [s]\"); ax.legend(); ax.set_title(\"states\")\n";
  s += "ax = axes[2]\n";
  s += "ax.plot(cols[\"t\"], cols[\"v\"], label=\"v [m/s]\")\n";
  s += "ax.plot(cols[\"t\"], cols[\"omega\"], label=\"omega [rad/s]\")\n";
  s += "ax.set_xlabel(\"t [s]\"); ax.legend(); ax.set_title(\"commands\")\n";
  s += "fig.tight_layout()\n";
  s += "out = os.path.splitext(CSV)[0] + \".png\"\n";
  s += "fig.savefig(out, dpi=130)\n";
  s += "print(out)\n";
  return s;
}

}  // namespace ddstab
