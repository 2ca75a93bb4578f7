#include <iostream>

#include <CLI11.hpp>

#include "fsns/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fractional stochastic Navier-Stokes on the torus: simulation, rate functional and LDP checks"};
  app.set_version_flag("--version", std::string(FSNS_VERSION));
  app.require_subcommand(1);

  fsns::CliOptions cli;
  std::string config, out;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Run configuration file");
    sub->add_option("--out", out, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Seed (overrides run.seed)");
    sub->add_option("--threads", cli.threads, "Worker threads")->check(CLI::PositiveNumber);
  };

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Integrate the stochastic equation and write the energy log and snapshots"},
      {"vorticity", "Integrate the vorticity form"},
      {"skeleton", "Integrate the controlled equation for a given control"},
      {"rate", "Minimize the control energy to reach the target set"},
      {"ldp", "Monte Carlo small-noise curve and sanity report against the rate"},
      {"check", "Run a check suite: estimates, identities or noise"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub);
    if (std::string(name) == "check") sub->add_option("suite", cli.suite, "estimates, identities or noise");
    sub->callback([&cli, sub] { cli.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fsns::kExitConfigError;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--config")) cli.config = config;
    if (sub->count("--out")) cli.out = out;
    if (sub->count("--seed")) cli.seed = seed;
  }
  return fsns::run_command(cli, std::cout, std::cerr);
}
