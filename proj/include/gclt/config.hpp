#pragma once

// Run configuration: an INI document with the sections
//
//   [run]       command, scenario, evaluator, n_list, dp_dx, times,
//               output_dir, seed, axiom_trials
//   [params]    mu_lo, mu_hi, sigma_lo, sigma_hi
//   [sequence]  generator, shape, drift_scale, table, sigma_set, mu_set
//   [weights]   generator, q, alpha, table
//   [phi]       name and its parameters (k | M | a, eps | s | c)
//   [grid]      L, nx, cfl, T, dt, stride
//
// Naming a scenario loads its catalog settings first; every key present
// overrides the loaded value. Unknown sections and keys are errors.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cltlab.hpp"
#include "errors.hpp"
#include "numeric.hpp"

namespace gclt {

enum class Command { pde, expect, clt, check_weights, scenario, list_scenarios };

inline std::string_view to_string(Command c) {
  switch (c) {
  case Command::pde: return "pde";
  case Command::expect: return "expect";
  case Command::clt: return "clt";
  case Command::check_weights: return "check-weights";
  case Command::scenario: return "scenario";
  case Command::list_scenarios: return "list-scenarios";
  }
  return "unknown";
}

inline Command command_from_string(std::string_view s) {
  for (auto c : {Command::pde, Command::expect, Command::clt, Command::check_weights,
                 Command::scenario, Command::list_scenarios})
    if (to_string(c) == s)
      return c;
  throw ConfigError("unknown command '" + std::string(s) + "'");
}

struct RunConfig {
  Command command = Command::clt;
  std::optional<std::string> scenario_name;
  Scenario scenario = default_scenario();
  // Output times of `pde`; empty means {grid.T}.
  std::vector<double> times;
  std::string output_dir;
  std::uint64_t seed = 0;
  // Randomized axiom checks run by `expect` (0 disables).
  int axiom_trials = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  static Scenario default_scenario() {
    Scenario s;
    s.name = "custom";
    s.law = two_point_law({SequenceGenerator::constant, {0.0, 0.0, 1.0, 1.0}, 0.0, {}});
    s.n_list = {4, 16, 64, 256};
    return s;
  }
};

namespace config_detail {

using boost::property_tree::ptree;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string where(std::string_view section, std::string_view key) {
  return "[" + std::string(section) + "] " + std::string(key);
}

inline double to_double(std::string_view section, std::string_view key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || v.empty())
    throw ConfigError(where(section, key) + ": invalid number '" + v + "'");
  return out;
}

template <class Int>
Int to_int(std::string_view section, std::string_view key, const std::string& raw) {
  const std::string v = trim(raw);
  Int out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size() || v.empty())
    throw ConfigError(where(section, key) + ": invalid integer '" + v + "'");
  return out;
}

inline std::vector<std::string> split(const std::string& raw, char sep) {
  std::string v = trim(raw);
  if (!v.empty() && v.front() == '[' && v.back() == ']')
    v = v.substr(1, v.size() - 2);
  std::vector<std::string> out;
  if (trim(v).empty())
    return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep))
    out.push_back(trim(item));
  return out;
}

inline std::vector<double> to_doubles(std::string_view section, std::string_view key,
                                      const std::string& raw) {
  std::vector<double> out;
  for (const auto& item : split(raw, ','))
    out.push_back(to_double(section, key, item));
  return out;
}

inline std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out += (k ? ", " : "") + format_double(v[k]);
  return out;
}

inline std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k)
    out += (k ? ", " : "") + std::to_string(v[k]);
  return out;
}

// Visits every key of a section, rejecting keys outside `allowed`.
template <class F>
void each_key(const ptree& section, std::string_view name, const std::set<std::string>& allowed,
              F&& f) {
  for (const auto& [key, node] : section) {
    if (!node.empty())
      throw ConfigError(where(name, key) + ": nested values are not supported");
    if (!allowed.count(key))
      throw ConfigError(where(name, key) + ": unknown key");
    f(key, node.data());
  }
}

inline const std::vector<std::string>& phi_keys(PhiKind k) {
  static const std::vector<std::string> none{};
  static const std::vector<std::string> freq{"k"};
  static const std::vector<std::string> clip{"M"};
  static const std::vector<std::string> step{"a", "eps"};
  static const std::vector<std::string> scale{"s"};
  static const std::vector<std::string> level{"c"};
  switch (k) {
  case PhiKind::cos_k:
  case PhiKind::sin_k: return freq;
  case PhiKind::clip_linear: return clip;
  case PhiKind::smooth_step: return step;
  case PhiKind::arctan_s: return scale;
  case PhiKind::constant: return level;
  default: return none;
  }
}

inline VariableSpec controls_from_sets(std::vector<double> sigmas, std::vector<double> mus) {
  if (!sigmas.empty() && !mus.empty())
    return joint_pair(std::move(sigmas), std::move(mus));
  if (!sigmas.empty())
    return rademacher_vol(std::move(sigmas));
  if (!mus.empty())
    return maximal_mean(std::move(mus));
  throw ConfigError("[sequence] sigma_set/mu_set: at least one control set must be nonempty");
}

inline std::string table_string(const std::vector<GParams>& t) {
  std::string out;
  for (std::size_t k = 0; k < t.size(); ++k)
    out += (k ? "; " : "") + join(std::vector<double>{t[k].mu_lo, t[k].mu_hi, t[k].sigma_lo, t[k].sigma_hi});
  return out;
}

} // namespace config_detail

// `command_override` is the command given on the command line; it must agree
// with [run] command when both are present.
inline RunConfig parse_config(const std::string& text,
                              std::optional<Command> command_override = std::nullopt) {
  using namespace config_detail;
  ptree pt;
  {
    std::istringstream in(text);
    try {
      boost::property_tree::ini_parser::read_ini(in, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("config parse error at line " + std::to_string(e.line()) + ": " +
                        e.message());
    }
  }

  static const std::set<std::string> sections{"run", "params", "sequence", "weights", "phi",
                                              "grid"};
  for (const auto& [name, node] : pt) {
    if (node.empty())
      throw ConfigError("key '" + name + "' appears outside of a section");
    if (!sections.count(name))
      throw ConfigError("unknown section [" + name + "]");
  }
  static const ptree empty_tree;
  auto section = [&](const std::string& name) -> const ptree& {
    auto it = pt.find(name);
    return it == pt.not_found() ? empty_tree : it->second;
  };

  RunConfig cfg;
  std::optional<Command> file_command;
  const ptree& run = section("run");
  if (auto it = run.find("command"); it != run.not_found())
    file_command = command_from_string(trim(it->second.data()));
  if (file_command && command_override && *file_command != *command_override)
    throw ConfigError("[run] command: '" + std::string(to_string(*file_command)) +
                      "' conflicts with command line '" +
                      std::string(to_string(*command_override)) + "'");
  if (!file_command && !command_override)
    throw ConfigError("[run] command: no command given");
  cfg.command = command_override ? *command_override : *file_command;

  if (auto it = run.find("scenario"); it != run.not_found()) {
    const std::string name = trim(it->second.data());
    try {
      cfg.scenario = find_scenario(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[run] scenario: ") + e.what());
    }
    cfg.scenario_name = name;
  }
  Scenario& scn = cfg.scenario;

  each_key(run, "run",
           {"command", "scenario", "evaluator", "n_list", "dp_dx", "times", "output_dir", "seed",
            "axiom_trials"},
           [&](const std::string& key, const std::string& v) {
             if (key == "evaluator") {
               try {
                 scn.evaluator = evaluator_from_string(trim(v));
               } catch (const std::invalid_argument& e) {
                 throw ConfigError(where("run", key) + ": " + e.what());
               }
             } else if (key == "n_list") {
               scn.n_list.clear();
               for (const auto& item : split(v, ','))
                 scn.n_list.push_back(to_int<std::size_t>("run", key, item));
             } else if (key == "dp_dx") {
               scn.dp_dx = to_double("run", key, v);
             } else if (key == "times") {
               cfg.times = to_doubles("run", key, v);
             } else if (key == "output_dir") {
               cfg.output_dir = trim(v);
             } else if (key == "seed") {
               cfg.seed = to_int<std::uint64_t>("run", key, v);
             } else if (key == "axiom_trials") {
               cfg.axiom_trials = to_int<int>("run", key, v);
             }
           });

  GParams& base = scn.law.seq.base;
  each_key(section("params"), "params", {"mu_lo", "mu_hi", "sigma_lo", "sigma_hi"},
           [&](const std::string& key, const std::string& v) {
             const double d = to_double("params", key, v);
             if (key == "mu_lo") base.mu_lo = d;
             else if (key == "mu_hi") base.mu_hi = d;
             else if (key == "sigma_lo") base.sigma_lo = d;
             else base.sigma_hi = d;
           });

  {
    std::optional<std::vector<double>> sigmas, mus;
    each_key(section("sequence"), "sequence",
             {"generator", "shape", "drift_scale", "table", "sigma_set", "mu_set"},
             [&](const std::string& key, const std::string& v) {
               try {
                 if (key == "generator") {
                   scn.law.seq.generator = sequence_generator_from_string(trim(v));
                 } else if (key == "shape") {
                   scn.law.shape = law_shape_from_string(trim(v));
                 } else if (key == "drift_scale") {
                   scn.law.seq.drift_scale = to_double("sequence", key, v);
                 } else if (key == "table") {
                   scn.law.seq.table.clear();
                   for (const auto& row : split(v, ';')) {
                     const auto p = to_doubles("sequence", key, row);
                     if (p.size() != 4)
                       throw ConfigError(where("sequence", key) +
                                         ": rows need mu_lo, mu_hi, sigma_lo, sigma_hi");
                     scn.law.seq.table.push_back({p[0], p[1], p[2], p[3]});
                   }
                 } else if (key == "sigma_set") {
                   sigmas = to_doubles("sequence", key, v);
                 } else if (key == "mu_set") {
                   mus = to_doubles("sequence", key, v);
                 }
               } catch (const std::invalid_argument& e) {
                 throw ConfigError(where("sequence", key) + ": " + e.what());
               }
             });
    if (sigmas || mus) {
      std::vector<double> s = sigmas ? *sigmas
                              : scn.law.fixed ? scn.law.fixed->sigma_set
                                              : std::vector<double>{};
      std::vector<double> m = mus ? *mus : scn.law.fixed ? scn.law.fixed->mu_set
                                                         : std::vector<double>{};
      try {
        scn.law.fixed = controls_from_sets(std::move(s), std::move(m));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[sequence] sigma_set/mu_set: ") + e.what());
      }
    }
  }

  each_key(section("weights"), "weights", {"generator", "q", "alpha", "table"},
           [&](const std::string& key, const std::string& v) {
             if (key == "generator") {
               try {
                 scn.weights.generator = weight_generator_from_string(trim(v));
               } catch (const std::invalid_argument& e) {
                 throw ConfigError(where("weights", key) + ": " + e.what());
               }
             } else if (key == "q") {
               scn.weights.q = to_double("weights", key, v);
             } else if (key == "alpha") {
               scn.weights.alpha = to_double("weights", key, v);
             } else {
               scn.weights.table = to_doubles("weights", key, v);
             }
           });

  {
    const ptree& ph = section("phi");
    PhiKind kind = scn.fn.kind;
    if (auto it = ph.find("name"); it != ph.not_found()) {
      try {
        kind = phi_kind_from_string(trim(it->second.data()));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[phi] name: ") + e.what());
      }
    }
    const auto& keys = phi_keys(kind);
    std::vector<double> params =
        kind == scn.fn.kind ? scn.fn.parameters : std::vector<double>(keys.size(), 0.0);
    if (kind != scn.fn.kind)
      params = phi::make(kind, {}).parameters;
    std::set<std::string> allowed(keys.begin(), keys.end());
    allowed.insert("name");
    each_key(ph, "phi", allowed, [&](const std::string& key, const std::string& v) {
      if (key == "name")
        return;
      for (std::size_t k = 0; k < keys.size(); ++k)
        if (keys[k] == key)
          params[k] = to_double("phi", key, v);
    });
    try {
      scn.fn = phi::make(kind, params);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[phi]: ") + e.what());
    }
  }

  each_key(section("grid"), "grid", {"L", "nx", "cfl", "T", "dt", "stride"},
           [&](const std::string& key, const std::string& v) {
             if (key == "L") scn.grid.L = to_double("grid", key, v);
             else if (key == "nx") scn.grid.nx = to_int<int>("grid", key, v);
             else if (key == "cfl") scn.grid.cfl = to_double("grid", key, v);
             else if (key == "T") scn.grid.T = to_double("grid", key, v);
             else if (key == "dt") scn.grid.dt = to_double("grid", key, v);
             else scn.grid.stride = to_int<int>("grid", key, v);
           });

  try {
    scn.validate();
    if (cfg.axiom_trials < 0)
      throw std::invalid_argument("[run] axiom_trials must be >= 0");
    for (std::size_t k = 0; k < cfg.times.size(); ++k) {
      if (!(cfg.times[k] >= 0.0 && cfg.times[k] <= scn.grid.T))
        throw std::invalid_argument("[run] times must lie in [0, grid.T]");
      if (k > 0 && !(cfg.times[k] > cfg.times[k - 1]))
        throw std::invalid_argument("[run] times must be ascending");
    }
    if (cfg.command == Command::pde)
      check_domain_coverage(scn.law.limit_params(), scn.fn, scn.grid);
    if (cfg.command == Command::scenario && !cfg.scenario_name)
      throw std::invalid_argument("[run] scenario: the scenario command needs a scenario name");
    if (cfg.command == Command::clt && scn.ratio_only)
      throw std::invalid_argument("[run] scenario: '" + scn.name +
                                  "' reports weight statistics only; use check-weights");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
  using namespace config_detail;
  const Scenario& s = cfg.scenario;
  std::ostringstream out;
  out << "[run]\n";
  out << "command = " << to_string(cfg.command) << "\n";
  if (cfg.scenario_name)
    out << "scenario = " << *cfg.scenario_name << "\n";
  out << "evaluator = " << to_string(s.evaluator) << "\n";
  out << "n_list = " << join(s.n_list) << "\n";
  out << "dp_dx = " << format_double(s.dp_dx) << "\n";
  if (!cfg.times.empty())
    out << "times = " << join(cfg.times) << "\n";
  if (!cfg.output_dir.empty())
    out << "output_dir = " << cfg.output_dir << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "axiom_trials = " << cfg.axiom_trials << "\n";

  const GParams& b = s.law.seq.base;
  out << "\n[params]\n";
  out << "mu_lo = " << format_double(b.mu_lo) << "\n";
  out << "mu_hi = " << format_double(b.mu_hi) << "\n";
  out << "sigma_lo = " << format_double(b.sigma_lo) << "\n";
  out << "sigma_hi = " << format_double(b.sigma_hi) << "\n";

  out << "\n[sequence]\n";
  out << "generator = " << to_string(s.law.seq.generator) << "\n";
  out << "shape = " << to_string(s.law.shape) << "\n";
  out << "drift_scale = " << format_double(s.law.seq.drift_scale) << "\n";
  if (!s.law.seq.table.empty())
    out << "table = " << table_string(s.law.seq.table) << "\n";
  if (s.law.fixed) {
    if (!s.law.fixed->sigma_set.empty())
      out << "sigma_set = " << join(s.law.fixed->sigma_set) << "\n";
    if (!s.law.fixed->mu_set.empty())
      out << "mu_set = " << join(s.law.fixed->mu_set) << "\n";
  }

  out << "\n[weights]\n";
  out << "generator = " << to_string(s.weights.generator) << "\n";
  out << "q = " << format_double(s.weights.q) << "\n";
  out << "alpha = " << format_double(s.weights.alpha) << "\n";
  if (!s.weights.table.empty())
    out << "table = " << join(s.weights.table) << "\n";

  out << "\n[phi]\n";
  out << "name = " << to_string(s.fn.kind) << "\n";
  const auto& keys = phi_keys(s.fn.kind);
  for (std::size_t k = 0; k < keys.size(); ++k)
    out << keys[k] << " = " << format_double(s.fn.parameters.at(k)) << "\n";

  out << "\n[grid]\n";
  out << "L = " << format_double(s.grid.L) << "\n";
  out << "nx = " << s.grid.nx << "\n";
  out << "cfl = " << format_double(s.grid.cfl) << "\n";
  out << "T = " << format_double(s.grid.T) << "\n";
  out << "dt = " << format_double(s.grid.dt) << "\n";
  out << "stride = " << s.grid.stride << "\n";
  return out.str();
}

} // namespace gclt
