#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gdl::cli {

inline constexpr const char* kSchema = "gdl-1";

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs the command line `args` (without the program name). Reports and
/// data go to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace gdl::cli
