#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace slslab::cli {

enum ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kUsage = 2,
  kInfeasible = 3,
  kInternal = 4,
};

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace slslab::cli
