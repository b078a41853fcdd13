#pragma once

#include <iosfwd>

#include "hdg5/config.hpp"

namespace hdg5 {

/// Process exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitUnstable = 4,
};

/// Builtin problem or, when problem_file is set, the custom definition.
ProblemSpec resolve_problem(const RunConfig& cfg);

/// Penalty table for the run. An explicit preset wins, then an inline [tau]
/// table, then the default for the problem's boundary kind.
StabilizationConfig resolve_tau(const RunConfig& cfg, const ProblemSpec& problem);

/// Executes one run. Primary output (CSV, stability verdict) goes to `out`;
/// progress and summaries go to `log`. Never throws; returns an ExitCode.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace hdg5
