#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evolve::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_model = 2,
  exit_nonconvergent = 3,
  exit_verification = 4,
};

/// Runs one invocation. `args` excludes the program name. Reports go to
/// `out` unless redirected with --out; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

const char* version() noexcept;

}  // namespace evolve::cli
