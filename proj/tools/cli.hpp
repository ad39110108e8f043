#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bjj::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kNumerical = 3,
    kUndefinedPhase = 4,
};

/// Runs the tool on `args` (without the program name) and returns the exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal with 17 significant digits, as written to every CSV cell.
std::string format_number(double x);

/// 64-bit FNV-1a of a byte string, as lowercase hex.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace bjj::cli
