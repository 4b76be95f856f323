#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wxaug::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kNumerical = 3 };

/// Runs one subcommand; `args` excludes the program name. Normal output goes
/// to `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wxaug::cli
