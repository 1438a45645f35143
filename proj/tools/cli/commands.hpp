#pragma once

#include <iosfwd>

#include "buridan/error.hpp"

namespace buridan::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kConfigError = 2, kIoError = 3, kNumericalError = 4 };

ExitCode exit_code_for(ErrorKind kind);

/// Entry point shared by the executable and the tests. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace buridan::cli
