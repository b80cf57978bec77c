#pragma once

#include <iosfwd>

namespace binreg {

// Exit codes: 0 success, 1 I/O, validation or usage error, 2 fit did not converge.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace binreg
