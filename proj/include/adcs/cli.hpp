#pragma once

#include <iosfwd>

namespace adcs {

/// Entry point of the adcs tool. Returns the process exit code; 0 only when
/// every field was processed.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace adcs
