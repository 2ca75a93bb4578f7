#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fsns/config.hpp"
#include "fsns/dynamics.hpp"
#include "fsns/ldp.hpp"

namespace fsns {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfigError = 2, kExitBlowUp = 3 };

/// Typed view of a Config for the run commands.
struct RunConfig {
  Config raw;
  std::string hash;  // sha256 of the serialized config without output.dir

  SimParams sim;
  bool dt_defaulted = false;
  std::vector<std::string> warnings;
  CovarianceSpec covariance;
  DiffusionSpec diffusion;

  std::string initial_preset;
  std::filesystem::path initial_snapshot;
  double initial_amplitude = 1.0;

  std::filesystem::path output_dir;
  std::size_t snapshot_every = 0;
  std::uint64_t seed = 0;

  OptimizerConfig optimizer;
  std::vector<double> epsilons;
  std::size_t samples = 0;
  SanityOptions sanity;

  std::filesystem::path control_dir;
  std::size_t control_intervals = 0;
};

/// Keys accepted in run configs.
const std::set<std::string>& known_config_keys();

/// Validates and converts. `command` selects which blocks are required.
RunConfig load_run_config(const Config& raw, const std::string& command);

std::string config_hash(const Config& raw);

SpectralField initial_state(const RunConfig& rc);
TargetSet build_target(const RunConfig& rc, const SpectralField& u0);
ControlPath load_control(const RunConfig& rc);

struct CliOptions {
  std::string command;  // simulate, vorticity, skeleton, rate, ldp, check
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string suite;  // check only
};

/// Runs one CLI command and returns its exit code. Progress goes to `out`,
/// diagnostics to `err`.
int run_command(const CliOptions& cli, std::ostream& out, std::ostream& err);

}  // namespace fsns
