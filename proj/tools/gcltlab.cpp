#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "gclt/config.hpp"
#include "gclt/run.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw gclt::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the weighted central limit theorem under sublinear "
               "expectations"};
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command,
                 "pde | expect | clt | check-weights | scenario | list-scenarios")
      ->required();
  app.add_option("--config", config_path, "run configuration (INI)");
  app.add_option("--out", out_dir, "output directory (default: [run] output_dir, then $" +
                                       std::string(gclt::kOutputDirEnv) + ", then .)");
  app.add_option("--seed", seed, "seed of the randomized axiom checks");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const gclt::Command cmd = gclt::command_from_string(command);
    gclt::RunConfig cfg;
    if (config_path.empty()) {
      if (cmd != gclt::Command::list_scenarios)
        throw gclt::ConfigError("--config is required for '" + command + "'");
      cfg.command = cmd;
    } else {
      cfg = gclt::parse_config(read_file(config_path), cmd);
    }
    if (seed)
      cfg.seed = *seed;
    const auto outcome = gclt::execute(cfg, gclt::resolve_output_dir(out_dir, cfg), std::cout);
    if (outcome.exit_code != 0) {
      std::cerr << "gcltlab: " << outcome.message << '\n';
      return outcome.exit_code;
    }
    for (const auto& p : outcome.artifacts)
      std::cerr << "wrote " << p.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "gcltlab: " << e.what() << '\n';
    return gclt::exit_code_for(std::current_exception());
  }
}
