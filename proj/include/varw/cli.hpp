#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace varw {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalid = 1,    // usage, file or model validation error
  kExitGuard = 2,      // iteration or step cap reached
  kExitCheckFailed = 3 // an exact identity or acceptance check failed
};

/// Entry point of the `varw` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace varw
