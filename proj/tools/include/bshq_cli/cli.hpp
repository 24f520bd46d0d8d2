#ifndef BSHQ_CLI_CLI_HPP
#define BSHQ_CLI_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace bshq::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1, // also usage errors
  kModelError = 2,
  kNumericalError = 3,
};

/// Run the command line in-process. args excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err);

} // namespace bshq::cli

#endif
