#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hallhom::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kSolver = 3,
  kAcceptance = 4,
};

/// Environment variable naming the default directory for output files.
inline constexpr const char* kOutputDirEnv = "HALLHOM_OUTPUT_DIR";

/// Entry point used by main() and the tests. Diagnostics go to `err`, each
/// line prefixed with "hallhom:<level>:<kind>:".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hallhom::cli
