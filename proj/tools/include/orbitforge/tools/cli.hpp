#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace orbitforge::tools {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitHypothesis = 3,
};

/// Runs one invocation. args excludes the program name. Reports go to `out`
/// (or the --output file); diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Invariant suite behind `<subcommand> --selftest`. Returns true on success
/// and writes a JSON summary to `out`.
bool selftest(const std::string& subcommand, std::ostream& out);

}  // namespace orbitforge::tools
