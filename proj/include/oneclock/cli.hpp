#pragma once

#include <string>
#include <vector>

namespace oneclock {

/// Entry point behind the `oneclock` binary. Subcommands: grid, select,
/// sweep, import-curves, analyze, calibrate, perturb, plot-data. Returns the
/// process exit status (0 on success); errors print to stderr.
int run_cli(const std::vector<std::string>& args);

} // namespace oneclock
