#pragma once

#include <iosfwd>

namespace nprach {

// Subcommands: generate, calibrate, campaign, pattern. Returns 0 on success,
// 1 on a validation or usage error, 2 on an I/O error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nprach
