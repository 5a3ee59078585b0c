#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tokex::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kIo = 2,
  kInternal = 3,
};

// Runs `tokex <args...>` (args excludes the program name). Machine-readable
// results go to `out` (or to --out files), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tokex::cli
