#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ale::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitError = 2, kExitNumeric = 3 };

/// Runs one `ale` subcommand. `args` excludes the program name. Messages go
/// to `out`/`err`; artifacts go to the directory named by --out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ale::cli
