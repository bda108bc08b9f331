#pragma once

#include <ostream>

namespace causalproc {

/// Runs one command line. The JSON result goes to `out` in one write; logs
/// and errors go to `err`. Exit codes: 0 success, 1 malformed input or
/// failure, 2 an invalid process (validate only).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace causalproc
