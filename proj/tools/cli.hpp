#pragma once

#include <iosfwd>

namespace recon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Parses argv, runs one subcommand and returns the process exit code:
/// 0 on success, 1 on a usage error, 2 on a data or fit error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace recon::cli
