#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sm {

/// Exit codes of the smctl command line.
enum ExitCode : int {
    kExitAccepted = 0,
    kExitRejected = 1,
    kExitUsage = 2,
    kExitInconclusive = 3,
};

/// Runs smctl with `args` (program name excluded), writing to `out`/`err`.
int run_smctl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sm
