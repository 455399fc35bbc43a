#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace robinlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerification = 2;

/// Runs one subcommand. Regular output goes to `out`, diagnostics and usage
/// text to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace robinlab::cli
