#pragma once

// Subcommand orchestration for the trdiff CLI.

#include <ostream>
#include <string>
#include <vector>

#include "trdiff/config.hpp"

namespace trdiff {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_numerical = 2, exit_validation = 3 };

struct CheckResult {
  std::string module;
  std::string name;
  bool pass = false;
  std::string detail;
};

// Invariant suite over all modules, sized to run in seconds.
std::vector<CheckResult> run_validation_suite(const RunConfig& cfg, unsigned threads);

// bands      -> bands.csv along Gamma-K-M-Gamma
// propagate  -> population.csv, snapshot_<t_fs>.csv
// diffract   -> diffraction_<spot>.csv, formfactor_<spot>.csv
// spectrum   -> spectrum_<spot>.csv
// validate   -> validation.csv and one line per check on `log`
// Errors are reported on `log` with the raising module; returns an ExitCode.
int run_pipeline(const RunConfig& cfg, const std::string& subcommand, unsigned threads, std::ostream& log);

}  // namespace trdiff
