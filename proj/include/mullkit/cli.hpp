#pragma once

#include <iosfwd>

namespace mullkit {

// Entry point of the mullkit executable. Returns 0 on success (including solver
// non-convergence), 2 on usage, parse or data errors, 1 on a failed benchmark.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mullkit
