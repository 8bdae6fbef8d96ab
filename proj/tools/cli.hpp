#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sacscore::cli {

// Stable exit codes for scripting.
enum ExitCode : int { ok = 0, usage = 1, input = 2, engine = 3, internal = 4 };

/// Runs one command line. Reports go to `out` (or the --output file),
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sacscore::cli
