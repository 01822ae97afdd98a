#pragma once

#include <iosfwd>

namespace wfnet {

/// Exit codes of the wfnet command.
enum ExitCode : int {
  exit_ok = 0,
  exit_error = 1,         // usage, parse or validation error
  exit_negative = 2,      // not AND-OR, unsound
  exit_inconclusive = 3,  // exploration bound reached
};

/// The wfnet command line; argv[0] is the program name.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wfnet
