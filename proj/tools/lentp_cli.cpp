#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lentp/parallel.hpp"
#include "lentp/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Lent-particle carre du champ experiments on Poisson configurations"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  int jobs = lentp::default_jobs();
  std::string out_dir = ".";
  app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "artifact directory");

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute a run configuration");
  run->add_option("config", config_path, "configuration file")->required();

  std::string registry;
  auto* list = app.add_subcommand("list", "show a registry");
  list->add_option("registry", registry, "models | functionals | gammas | experiments")->required();

  app.add_subcommand("fixtures", "write the fixture configurations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (*run) {
    lentp::RunOptions options;
    options.seed = seed;
    options.jobs = jobs;
    options.out_dir = out_dir;
    return lentp::run_config_file(config_path, options, std::cout, std::cerr).exit_code;
  }
  if (*list) return lentp::list_registry(registry, std::cout, std::cerr);
  try {
    return lentp::write_fixtures(out_dir, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return lentp::kExitError;
  }
}
