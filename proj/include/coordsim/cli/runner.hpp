#pragma once

#include <string>

#include "coordsim/cli/config.hpp"

namespace coordsim::cli {

inline constexpr const char* kVersion = "coordsim 0.1.0";

/// Process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitInfeasibleExtension = 3,
  kExitDimensionCap = 4,
  kExitInfeasibleEntangled = 5,
  kExitBudget = 6,
};

/// Exit status for an exception escaping a run.
int exit_code_for(const std::exception& e);

struct RunResult {
  Json record;      // config echo, version, wall time, rows, diagnostics
  std::string csv;  // rows only; no timing, so reruns are byte-identical
  int exit_code = kExitOk;
};

/// Runs the configured experiment. Library errors propagate as exceptions;
/// outcomes that still produce a record (an entangled target, an exhausted
/// oracle budget) are reported through exit_code.
RunResult run(const ExperimentConfig& config);

struct OutputPaths {
  std::string json;
  std::string csv;
};

/// Writes <out_dir>/<kind>-<stamp>.json and .csv, appending -1, -2, ... if
/// either name is taken.
OutputPaths write_outputs(const RunResult& result, const ExperimentConfig& config, const std::string& stamp);

/// UTC time as YYYYMMDDTHHMMSSZ.
std::string utc_stamp();

}  // namespace coordsim::cli
