#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace surftest::cli {

/// Everything a `test` or `export-mean` invocation resolved from its flags.
struct Manifest {
  std::string command;  // "globe", "profile" or "export-mean"
  std::string group1;
  std::string group2;
  bool log10p1 = false;
  double q = 0.9;
  char fix = 't';
  std::optional<double> at;
  std::optional<std::size_t> index;
  bool all = false;
  std::string out = "-";
};

enum ExitCode : int { kOk = 0, kValidation = 1, kDegenerate = 2 };

/// Runs the command line. `out` receives reports written to "-", `err`
/// receives diagnostics. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace surftest::cli
