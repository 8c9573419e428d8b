#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ens::app {

enum ExitCode { kOk = 0, kValidationFailure = 1, kRuntimeFailure = 2 };

struct CommandResult {
  int exit_code = kOk;
  std::string summary;
  std::vector<std::string> artifacts;
};

// Parses argv (argv[0] is the program name) and runs one subcommand,
// writing reports to `out` and diagnostics to `err`.
CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ens::app
