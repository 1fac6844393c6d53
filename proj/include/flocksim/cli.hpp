#pragma once

#include <iosfwd>

namespace flocksim {

/// Entry point of the `flocksim` tool. Exit codes: 0 success, 1 runtime
/// failure, 2 bad input (config, logs, flags).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace flocksim
