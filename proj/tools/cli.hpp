#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bmprior::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Runs one command line. args[0] is the program name. Text output that is
// not directed to a file goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bmprior::cli
