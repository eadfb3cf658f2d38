#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace radmax {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Entry point behind the radmax executable. `args` excludes the program
/// name. Records go to `out` (or --out), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radmax
