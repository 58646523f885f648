#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fmdiag::cli {

// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitModel = 4;

// Runs one command line (args[0] is the program name). Reports go to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fmdiag::cli
