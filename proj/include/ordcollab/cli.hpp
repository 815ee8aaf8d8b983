#pragma once

#include <iosfwd>

namespace ordcollab {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,  // bad arguments or config
  kExitRuntime = 2,     // failure while running (message carries fold/config context)
};

/// Entry point for `ordcollab <subcommand> ...`. Subcommands: synth,
/// featurize, train, eval, sweep, report.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ordcollab
