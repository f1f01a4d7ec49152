#pragma once

#include <ostream>

namespace mgcn::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kDataError = 3,
  kNumericError = 4,
};

/// Entry point of the `mgcn` tool. Never throws.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace mgcn::cli
