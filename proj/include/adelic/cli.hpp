#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace adelic {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitTolerance = 3, kExitCancellation = 4 };

/// Runs one command; args exclude the program name.  Primary output goes to
/// `out` unless --out names a file (a <file>.meta.json sidecar is written too).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace adelic
