#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gcf::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kDataError = 3,
  kNumericError = 4,
  kExpectedContrast = 5,
};

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace gcf::cli
