#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amalgam::cli {

enum ExitCode : int {
  kOk = 0,
  kDiagnosticFailed = 1,
  kUsageError = 2,
};

/// Runs one invocation. `args` excludes the program name. Reports go to
/// `out` (or the --out file), messages to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace amalgam::cli
