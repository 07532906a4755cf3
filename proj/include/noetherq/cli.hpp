#pragma once

#include <ostream>

namespace noetherq {

// Exit codes: 0 success (and every verdict consistent), 1 input or usage
// errors, 2 at least one verdict came out inconsistent.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace noetherq
