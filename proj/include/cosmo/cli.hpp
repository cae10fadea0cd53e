#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cosmo {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitMath = 2, kExitVerify = 3 };

/// Runs one command line (args[0] is the program name) and returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cosmo
