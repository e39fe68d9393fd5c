#pragma once

// Batch experiment configuration: a line-based `[experiment]` / `key = value`
// schema. Parse errors carry the offending key and line number. Angles are
// radians unless the value carries an explicit `deg` suffix (e.g. 30deg).

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddstab/simulation.hpp"
#include "ddstab/types.hpp"

namespace ddstab {

enum class ExperimentMode { SINGLE, MONTE_CARLO, RING };

inline const char* to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::SINGLE: return "single";
    case ExperimentMode::MONTE_CARLO: return "monte_carlo";
    default: return "ring";
  }
}

struct ExperimentSpec {
  std::string name;
  ExperimentMode mode = ExperimentMode::SINGLE;
  SimConfig sim{};          // fully resolved (defaults materialized)
  int runs = 100;           // monte_carlo mode
  double ring_radius = 12.0;
  int ring_starts = 8;
  double ring_heading = 0.0;  // [rad]
  std::string out_dir = "out";
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string key, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) +
                           (key.empty() ? std::string() : ": key '" + key + "'") + ": " +
                           message),
        line_(line),
        key_(std::move(key)) {}

  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) {
    out.push_back(tok);
  }
  return out;
}

inline double parse_number(const std::string& tok, int line, const std::string& key) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value)) {
    throw ConfigError(line, key, "expected a finite number, got '" + tok + "'");
  }
  return value;
}

// Angle token: bare radians, or a number with a `deg`/`rad` suffix.
inline double parse_angle(std::string tok, int line, const std::string& key) {
  double scale = 1.0;
  if (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "deg") == 0) {
    scale = kPi / 180.0;
    tok.resize(tok.size() - 3);
  } else if (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "rad") == 0) {
    tok.resize(tok.size() - 3);
  }
  return scale * parse_number(tok, line, key);
}

inline std::uint64_t parse_u64(const std::string& tok, int line, const std::string& key) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const unsigned long long value = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || tok.find('-') != std::string::npos) {
    throw ConfigError(line, key, "expected a non-negative integer, got '" + tok + "'");
  }
  return static_cast<std::uint64_t>(value);
}

inline int parse_int(const std::string& tok, int line, const std::string& key, int min) {
  const double d = parse_number(tok, line, key);
  if (d < static_cast<double>(min) || d > 2147483647.0 ||
      d != static_cast<double>(static_cast<int>(d))) {
    throw ConfigError(line, key,
                      "expected an integer >= " + std::to_string(min) + ", got '" + tok +
                          "'");
  }
  return static_cast<int>(d);
}

inline Pose parse_pose(const std::string& value, int line, const std::string& key) {
  const auto toks = split_ws(value);
  if (toks.size() != 3) {
    throw ConfigError(line, key, "expected 'x y theta' (3 values)");
  }
  return make_pose(parse_number(toks[0], line, key), parse_number(toks[1], line, key),
                   parse_angle(toks[2], line, key));
}

inline double parse_positive(const std::string& tok, int line, const std::string& key) {
  const double v = parse_number(tok, line, key);
  if (!(v > 0.0)) {
    throw ConfigError(line, key, "value must be > 0");
  }
  return v;
}

struct PendingSpec {
  ExperimentSpec spec;
  int section_line = 0;
  bool has_start = false;
};

inline void finalize(PendingSpec& p, std::vector<ExperimentSpec>& out) {
  if (p.spec.mode != ExperimentMode::RING && !p.has_start) {
    throw ConfigError(p.section_line, "start", "missing required key 'start'");
  }
  try {
    p.spec.sim = resolve_config(p.spec.sim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(p.section_line, "", e.what());
  }
  out.push_back(p.spec);
}

}  // namespace detail

// Parses a batch document into fully-validated experiment specs with all
// defaults materialized. Unknown keys, malformed values, and invariant
// violations raise ConfigError naming the key and line.
inline std::vector<ExperimentSpec> parse_config(const std::string& text) {
  using detail::parse_angle;
  using detail::parse_int;
  using detail::parse_number;
  using detail::parse_pose;
  using detail::parse_positive;
  using detail::parse_u64;

  std::vector<ExperimentSpec> specs;
  std::optional<detail::PendingSpec> current;
  std::map<std::string, int> seen_names;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) {
      raw.resize(hash);
    }
    const std::string s = detail::trim(raw);
    if (s.empty()) {
      continue;
    }

    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) {
        throw ConfigError(line, "", "malformed section header; expected [name]");
      }
      if (current) {
        detail::finalize(*current, specs);
      }
      const std::string name = detail::trim(s.substr(1, s.size() - 2));
      if (name.empty()) {
        throw ConfigError(line, "", "experiment name must not be empty");
      }
      if (!seen_names.emplace(name, line).second) {
        throw ConfigError(line, "", "duplicate experiment name '" + name + "'");
      }
      current = detail::PendingSpec{};
      current->spec.name = name;
      current->spec.sim.bounds = reference_noise_bounds();  // default: noisy campaign
      current->section_line = line;
      continue;
    }

    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, "", "expected 'key = value'");
    }
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    if (!current) {
      throw ConfigError(line, key, "key outside of any [experiment] section");
    }
    if (key.empty() || value.empty()) {
      throw ConfigError(line, key, "expected 'key = value'");
    }

    SimConfig& sim = current->spec.sim;
    if (key == "mode") {
      if (value == "single") {
        current->spec.mode = ExperimentMode::SINGLE;
      } else if (value == "monte_carlo" || value == "mc") {
        current->spec.mode = ExperimentMode::MONTE_CARLO;
      } else if (value == "ring") {
        current->spec.mode = ExperimentMode::RING;
      } else {
        throw ConfigError(line, key, "expected single | monte_carlo | ring");
      }
    } else if (key == "law") {
      if (value == "two-regime") {
        sim.law_variant = LawVariant::TWO_REGIME;
      } else if (value == "global-only") {
        sim.law_variant = LawVariant::GLOBAL_ONLY;
      } else {
        throw ConfigError(line, key, "expected two-regime | global-only");
      }
    } else if (key == "start") {
      sim.start_pose = parse_pose(value, line, key);
      current->has_start = true;
    } else if (key == "goal") {
      sim.goal_pose = parse_pose(value, line, key);
    } else if (key == "seed") {
      sim.seed = parse_u64(value, line, key);
    } else if (key == "runs") {
      current->spec.runs = parse_int(value, line, key, 1);
    } else if (key == "radius") {
      current->spec.ring_radius = parse_positive(value, line, key);
    } else if (key == "starts") {
      current->spec.ring_starts = parse_int(value, line, key, 1);
    } else if (key == "heading") {
      current->spec.ring_heading = wrap_angle(parse_angle(value, line, key));
    } else if (key == "Ts") {
      sim.Ts = parse_positive(value, line, key);
    } else if (key == "max_steps") {
      sim.max_steps = parse_int(value, line, key, 1);
    } else if (key == "rho_tol") {
      sim.rho_tol = parse_positive(value, line, key);
    } else if (key == "theta_tol") {
      sim.theta_tol = parse_positive(value, line, key);
    } else if (key == "arrival_pos_tol") {
      sim.arrival_pos_tol = parse_positive(value, line, key);
    } else if (key == "arrival_theta_tol") {
      sim.arrival_theta_tol = parse_positive(value, line, key);
    } else if (key == "gamma") {
      sim.controller.gamma = parse_positive(value, line, key);
    } else if (key == "k") {
      sim.controller.k = parse_positive(value, line, key);
    } else if (key == "h") {
      sim.controller.h = parse_positive(value, line, key);
    } else if (key == "k2") {
      sim.controller.k2 = parse_positive(value, line, key);
    } else if (key == "eps_P") {
      if (value == "auto") {
        sim.controller.eps_P = std::numeric_limits<double>::quiet_NaN();
      } else {
        sim.controller.eps_P = parse_positive(value, line, key);
      }
    } else if (key == "noise") {
      if (value == "reference") {
        sim.bounds = reference_noise_bounds();
      } else if (value == "none") {
        sim.bounds = NoiseBounds{};
      } else {
        const auto toks = detail::split_ws(value);
        if (toks.size() != 5) {
          throw ConfigError(line, key,
                            "expected reference | none | 'eX eY etheta ev eomega'");
        }
        NoiseBounds b;
        b.eps_X_max = parse_number(toks[0], line, key);
        b.eps_Y_max = parse_number(toks[1], line, key);
        b.eps_theta_max = parse_number(toks[2], line, key);
        b.eps_v_max = parse_number(toks[3], line, key);
        b.eps_omega_max = parse_number(toks[4], line, key);
        try {
          validate_bounds(b);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(line, key, e.what());
        }
        sim.bounds = b;
      }
    } else if (key == "record") {
      if (value == "true") {
        sim.record_trajectory = true;
      } else if (value == "false") {
        sim.record_trajectory = false;
      } else {
        throw ConfigError(line, key, "expected true | false");
      }
    } else if (key == "out") {
      current->spec.out_dir = value;
    } else {
      throw ConfigError(line, key, "unknown key");
    }
  }
  if (current) {
    detail::finalize(*current, specs);
  }
  return specs;
}

namespace detail {

inline std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Serializes a resolved spec back into the config schema; parsing the result
// reproduces the spec field-for-field (doubles at full precision).
inline std::string emit_resolved_config(const ExperimentSpec& spec) {
  using detail::fmt_full;
  std::string s;
  s += "[" + spec.name + "]\n";
  s += std::string("mode = ") + to_string(spec.mode) + "\n";
  s += std::string("law = ") + to_string(spec.sim.law_variant) + "\n";
  const Pose& st = spec.sim.start_pose;
  const Pose& go = spec.sim.goal_pose;
  s += "start = " + fmt_full(st.x) + " " + fmt_full(st.y) + " " + fmt_full(st.theta) + "\n";
  s += "goal = " + fmt_full(go.x) + " " + fmt_full(go.y) + " " + fmt_full(go.theta) + "\n";
  s += "seed = " + std::to_string(spec.sim.seed) + "\n";
  s += "runs = " + std::to_string(spec.runs) + "\n";
  s += "radius = " + fmt_full(spec.ring_radius) + "\n";
  s += "starts = " + std::to_string(spec.ring_starts) + "\n";
  s += "heading = " + fmt_full(spec.ring_heading) + "\n";
  s += "Ts = " + fmt_full(spec.sim.Ts) + "\n";
  s += "max_steps = " + std::to_string(spec.sim.max_steps) + "\n";
  s += "rho_tol = " + fmt_full(spec.sim.rho_tol) + "\n";
  s += "theta_tol = " + fmt_full(spec.sim.theta_tol) + "\n";
  s += "arrival_pos_tol = " + fmt_full(spec.sim.arrival_pos_tol) + "\n";
  s += "arrival_theta_tol = " + fmt_full(spec.sim.arrival_theta_tol) + "\n";
  s += "gamma = " + fmt_full(spec.sim.controller.gamma) + "\n";
  s += "k = " + fmt_full(spec.sim.controller.k) + "\n";
  s += "h = " + fmt_full(spec.sim.controller.h) + "\n";
  s += "k2 = " + fmt_full(spec.sim.controller.k2) + "\n";
  s += "eps_P = " + fmt_full(spec.sim.controller.eps_P) + "\n";
  const NoiseBounds& b = spec.sim.bounds;
  s += "noise = " + fmt_full(b.eps_X_max) + " " + fmt_full(b.eps_Y_max) + " " +
       fmt_full(b.eps_theta_max) + " " + fmt_full(b.eps_v_max) + " " +
       fmt_full(b.eps_omega_max) + "\n";
  s += std::string("record = ") + (spec.sim.record_trajectory ? "true" : "false") + "\n";
  s += "out = " + spec.out_dir + "\n";
  return s;
}

}  // namespace ddstab
