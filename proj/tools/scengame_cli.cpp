#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "scengame/cli/commands.hpp"

namespace {

using namespace scengame;

// --workers beats SCENGAME_THREADS beats the config file.
void apply_overrides(cli::RunConfig& c, const std::optional<std::string>& out,
                     const std::optional<int>& workers,
                     const std::optional<std::uint64_t>& seed) {
  if (out) c.output_dir = *out;
  if (seed) c.seed = *seed;
  if (workers) {
    c.admm.workers = *workers;
  } else if (const char* env = std::getenv("SCENGAME_THREADS"); env && *env) {
    try {
      c.admm.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("SCENGAME_THREADS is not an integer: ") + env);
    }
  }
  c.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scenario-game certificates and consensus ADMM solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;

  std::string chosen;
  for (const auto& [name, help] :
       {std::pair{"certify", "Evaluate the sample-complexity certificate"},
        std::pair{"solve", "Run consensus ADMM and write trace.csv and summary.json"},
        std::pair{"compare", "Run ADMM against the centralized reference"},
        std::pair{"sweep", "Run solve for every S in sweep.s_list"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "INI configuration file")->required();
    sub->add_option("--out", out, "Output directory (overrides output.dir)");
    sub->add_option("--workers", workers, "Worker threads (0: all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "Root seed (overrides problem.seed)");
    sub->callback([&chosen, n = std::string(name)] { chosen = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitUsage;
  }

  try {
    cli::RunConfig c = cli::load_config(config_path);
    apply_overrides(c, out, workers, seed);
    if (chosen == "certify") return cli::cmd_certify(c, std::cout);
    if (chosen == "solve") return cli::cmd_solve(c, std::cout);
    if (chosen == "compare") return cli::cmd_compare(c, std::cout);
    return cli::cmd_sweep(c, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kExitUsage;
  } catch (const OracleSizeError& e) {
    std::cerr << e.what() << '\n';
    return cli::kExitOracleRefused;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitUsage;
  }
}
