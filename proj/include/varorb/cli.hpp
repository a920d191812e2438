#pragma once

#include "varorb/config.hpp"

#include <iosfwd>
#include <string>

namespace varorb {

enum ExitCode : int { ExitSuccess = 0, ExitConfigError = 1, ExitRunFailure = 2, ExitUndetermined = 3 };

struct CommandContext {
    std::string output_dir; ///< overrides the config's output_dir when non-empty
    bool quiet = false;
    std::ostream* out = nullptr; ///< JSON report stream (stdout)
    std::ostream* log = nullptr; ///< progress and errors (stderr)
};

/// Hypothesis check: writes check.json; 0 when every hypothesis and the energy condition pass, else 2.
int cmd_check(const RunConfig& cfg, const CommandContext& ctx);

/// Single minimization: writes loop.json, trace.csv, orbit.csv, summary.json; 0 converged, 2 otherwise.
int cmd_minimize(const RunConfig& cfg, const CommandContext& ctx);

/// Radius sweep: writes sweep.json, orbit_R<R>.csv, plot_data.csv, timings.csv;
/// 0 Hyperbolic, 3 Undetermined, 2 any other outcome.
int cmd_sweep(const RunConfig& cfg, const CommandContext& ctx);

/// Full command line: <check|minimize|sweep> --config PATH [--out DIR] [--seed U64] [--quiet].
int run_cli(int argc, char** argv);

} // namespace varorb
