#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpm/config.hpp"

/// Drivers behind the command-line tool. Each writes its outputs under
/// config.output.dir and returns an exit code.
namespace dpm::app {

enum ExitCode : int {
  kOk = 0,
  kError = 1,
  kBoundFailed = 2,
  kUnexpectedBlowup = 3,
  kConfigError = 4,
};

struct Outcome {
  int exit_code = kOk;
  std::string message;
  /// Headline numbers for sweep summaries, in a fixed order per command.
  std::vector<std::pair<std::string, double>> metrics;
};

/// Initial data or forcing described by `spec`. For file data with the
/// restart flag, the stored time and g are reported through the pointers.
PhysicalField build_field(const config::FieldSpec& spec, const Domain& domain, double* start_time = nullptr,
                          std::optional<double>* g = nullptr);

/// Writes <dir>/<csv>, optional snapshots snap_NNNNNN.dpmf and a checkpoint.
Outcome run_dpm(const config::RunConfig& config, std::ostream& log);

/// Writes <dir>/<csv> and <dir>/summary.csv.
Outcome run_blowup(const config::RunConfig& config, std::ostream& log);

/// Cartesian product of the sweep lists; point i runs in <dir>/point_<i>
/// and <dir>/summary.csv lists every point.
Outcome run_sweep(const config::RunConfig& config, std::ostream& log);

/// Exit code for an exception escaping a driver: 4 for configuration and
/// input-format errors, 1 otherwise.
int exit_code_for(const std::exception& e);

}  // namespace dpm::app
