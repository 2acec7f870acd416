#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace prophet {

inline constexpr std::string_view kVersion = "0.1.0";

/// Exit status contract of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitComputation = 1, kExitUsage = 2 };

/// Parses `args` (without the program name), runs the subcommand and writes
/// its CSV/JSON artifact to --out or `out`. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Locale-independent shortest-ish rendering with 12 significant digits.
std::string format_number(double x);

} // namespace prophet
