#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsdiff::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Runs the tool with `args` (program name excluded). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsdiff::cli
