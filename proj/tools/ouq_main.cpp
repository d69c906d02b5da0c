#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ouq/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Worst-case quantile bounds over moment-constrained input classes"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir = ".";
  std::int64_t seed_override = -1;
  int workers = -1;

  CLI::App* run = app.add_subcommand("run", "execute the configured task");
  run->add_option("-c,--config", config_path, "problem configuration file")->required();
  run->add_option("-o,--output-dir", output_dir, "directory for result files");
  run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--workers", workers, "worker threads (0 = all available)");

  CLI::App* validate = app.add_subcommand("validate", "check the configuration only");
  validate->add_option("-c,--config", config_path, "problem configuration file")->required();
  validate->add_option("--workers", workers, "worker threads (0 = all available)");

  CLI11_PARSE(app, argc, argv);

  ouq::ProblemConfig config;
  try {
    config = ouq::load_config(config_path);
  } catch (...) {
    return ouq::exit_code_for_current_exception(std::cerr);
  }
  if (seed_override >= 0) {
    config.seed = static_cast<std::uint64_t>(seed_override);
    config.solver.seed = config.seed;
  }
  if (workers >= 0) {
    config.workers = workers;
    config.solver.workers = workers;
  }

  if (app.got_subcommand(run)) return ouq::run_task(config, output_dir, std::cerr);
  return ouq::validate_config(config, std::cerr);
}
