#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hoyer::cli {

enum ExitCode : int {
    kOk = 0,
    kVerificationFailed = 1,
    kUsageError = 2,
    kIoError = 3,
};

// `args` excludes the program name. Console output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hoyer::cli
