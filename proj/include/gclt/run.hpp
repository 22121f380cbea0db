#pragma once

// Command execution and CSV artifacts. Every artifact is written to
// `<name>.partial` and renamed once the command has finished, so a failed
// run leaves only suffixed files behind.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cltlab.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "numeric.hpp"

namespace gclt {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "GCLTLAB_OUT";

// --out, then [run] output_dir, then $GCLTLAB_OUT, then the working directory.
inline std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_out,
                                                const RunConfig& cfg) {
  if (cli_out && !cli_out->empty())
    return *cli_out;
  if (!cfg.output_dir.empty())
    return cfg.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env)
    return env;
  return ".";
}

class Artifact {
public:
  Artifact(const std::filesystem::path& dir, const std::string& name)
      : final_(dir / name), partial_(dir / (name + ".partial")) {
    std::filesystem::remove(final_);
    out_.open(partial_, std::ios::binary | std::ios::trunc);
    if (!out_)
      throw std::runtime_error("cannot open " + partial_.string() + " for writing");
  }

  void line(const std::string& text) {
    out_ << text << '\n';
    out_.flush();
  }
  void write(const std::string& text) {
    out_ << text;
    out_.flush();
  }

  void commit() {
    out_.close();
    std::filesystem::rename(partial_, final_);
  }

  const std::filesystem::path& path() const { return final_; }

private:
  std::filesystem::path final_, partial_;
  std::ofstream out_;
};

inline std::string csv_row(std::initializer_list<std::string> fields) {
  std::string out;
  bool first = true;
  for (const auto& f : fields) {
    if (!first)
      out += ',';
    out += f;
    first = false;
  }
  return out;
}

inline std::string csv_row(const ConvergenceRow& r) {
  return csv_row({std::to_string(r.n), format_double(r.value_n), format_double(r.limit),
                  format_double(r.abs_error), format_double(r.weight_ratio),
                  format_double(r.sigma_dev), format_double(r.mu_dev)});
}

inline void write_scenario_list(std::ostream& out) {
  for (const auto& s : scenario_catalog()) {
    out << s.name << "  weights=" << to_string(s.weights.generator)
        << " sequence=" << to_string(s.law.seq.generator) << " shape=" << to_string(s.law.shape)
        << " phi=" << to_string(s.fn.kind) << " evaluator=" << to_string(s.evaluator)
        << " n_list=" << config_detail::join(s.n_list) << (s.ratio_only ? " (weights only)" : "")
        << '\n';
  }
}

namespace run_detail {

inline void run_convergence_csv(const Scenario& scn, Artifact& csv) {
  csv.line("n,value_n,limit,abs_error,weight_ratio,sigma_dev,mu_dev");
  run_convergence(scn, [&](const ConvergenceRow& r) { csv.line(csv_row(r)); });
}

inline void run_weights_csv(const Scenario& scn, Artifact& csv) {
  csv.line("n,ratio");
  for (std::size_t n = 1; n <= scn.n_list.back(); ++n)
    csv.line(csv_row({std::to_string(n), format_double(weight_ratio(scn.weights, n))}));
}

inline void run_pde_csv(const RunConfig& cfg, Artifact& csv) {
  const Scenario& scn = cfg.scenario;
  const auto vg = solve_gheat(scn.law.limit_params(), scn.fn, scn.grid);
  const std::vector<double> times = cfg.times.empty() ? std::vector<double>{scn.grid.T}
                                                      : cfg.times;
  csv.line("t,x,u");
  for (double t : times)
    for (int j = 0; j <= scn.grid.nx; ++j) {
      const double x = scn.grid.node(j);
      csv.line(csv_row({format_double(t), format_double(x), format_double(eval_at(vg, t, x))}));
    }
}

inline void run_expect_csv(const RunConfig& cfg, Artifact& csv) {
  const Scenario& scn = cfg.scenario;
  csv.line("n,value,method");
  for (std::size_t n : scn.n_list) {
    const auto r = evaluate_sum(scn, n);
    csv.line(csv_row({std::to_string(n), format_double(r.value), std::string(to_string(r.method))}));
  }
}

inline void run_axioms_csv(const RunConfig& cfg, Artifact& csv) {
  const Scenario& scn = cfg.scenario;
  const std::size_t n = scn.n_list.front();
  const Evaluator eval = [&](const Payoff& f) {
    if (scn.evaluator == EvaluatorKind::tree)
      return expect_weighted_sum_tree(scn.law, scn.weights, f, n).value;
    return expect_weighted_sum_grid(scn.law, scn.weights, f, n,
                                    covering_grid(scn.law, scn.weights, n, scn.dp_dx))
        .value;
  };
  const auto rep = axiom_suite(eval, default_axiom_catalog(), cfg.axiom_trials, cfg.seed);
  csv.line("n,trials,monotonicity,constant_preserving,subadditivity,homogeneity,cash_invariance");
  csv.line(csv_row({std::to_string(n), std::to_string(rep.trials), format_double(rep.monotonicity),
                    format_double(rep.constant_preserving), format_double(rep.subadditivity),
                    format_double(rep.homogeneity), format_double(rep.cash_invariance)}));
}

} // namespace run_detail

struct RunOutcome {
  int exit_code = 0;
  std::string message;
  std::vector<std::filesystem::path> artifacts;
};

inline int exit_code_for(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const ConfigError&) {
    return 2;
  } catch (const std::invalid_argument&) {
    return 2;
  } catch (const std::out_of_range&) {
    return 2;
  } catch (const NumericError&) {
    return 3;
  } catch (const CapacityError&) {
    return 4;
  } catch (...) {
    return 1;
  }
}

// Runs a validated configuration. `log` receives human-readable progress
// and the scenario list of `list-scenarios`.
inline RunOutcome execute(const RunConfig& cfg, const std::filesystem::path& out_dir,
                          std::ostream& log) {
  RunOutcome outcome;
  if (cfg.command == Command::list_scenarios) {
    write_scenario_list(log);
    return outcome;
  }
  try {
    cfg.scenario.validate();
  } catch (const std::exception& e) {
    outcome.exit_code = exit_code_for(std::current_exception());
    outcome.message = std::string("invalid configuration: ") + e.what();
    return outcome;
  }

  const auto start = std::chrono::steady_clock::now();
  std::vector<Artifact> pending;
  pending.reserve(3);
  try {
    std::filesystem::create_directories(out_dir);
    const Scenario& scn = cfg.scenario;
    switch (cfg.command) {
    case Command::clt:
      run_detail::run_convergence_csv(scn, pending.emplace_back(out_dir, "convergence.csv"));
      break;
    case Command::scenario:
      if (scn.ratio_only)
        run_detail::run_weights_csv(scn, pending.emplace_back(out_dir, "weights.csv"));
      else
        run_detail::run_convergence_csv(scn, pending.emplace_back(out_dir, "convergence.csv"));
      break;
    case Command::check_weights:
      run_detail::run_weights_csv(scn, pending.emplace_back(out_dir, "weights.csv"));
      break;
    case Command::pde:
      run_detail::run_pde_csv(cfg, pending.emplace_back(out_dir, "pde_slice.csv"));
      break;
    case Command::expect:
      run_detail::run_expect_csv(cfg, pending.emplace_back(out_dir, "expect.csv"));
      if (cfg.axiom_trials > 0)
        run_detail::run_axioms_csv(cfg, pending.emplace_back(out_dir, "axioms.csv"));
      break;
    case Command::list_scenarios:
      break;
    }
  } catch (const std::exception& e) {
    outcome.exit_code = exit_code_for(std::current_exception());
    outcome.message = e.what();
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    Artifact meta(out_dir, "run.meta");
    meta.line("# gcltlab " + std::string(kVersion) + ", compiler " + __VERSION__);
    meta.line("# wall_time_s = " + format_double(wall));
    meta.line("# exit_code = " + std::to_string(outcome.exit_code));
    if (outcome.exit_code != 0)
      meta.line("# error = " + outcome.message);
    if (!cfg.scenario.fn.bounded)
      meta.line("# note: unbounded test function; values are computed on a truncated domain");
    meta.write(serialize_config(cfg));
    pending.push_back(std::move(meta));
  } catch (const std::exception& e) {
    if (outcome.exit_code == 0) {
      outcome.exit_code = 1;
      outcome.message = e.what();
    }
  }

  if (outcome.exit_code == 0) {
    for (auto& a : pending) {
      a.commit();
      outcome.artifacts.push_back(a.path());
    }
  }
  return outcome;
}

} // namespace gclt
