#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace binrec::cli {

enum ExitCode : int { kOk = 0, kUsageOrDomain = 1, kSolverFailure = 2 };

/// Runs one invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace binrec::cli
