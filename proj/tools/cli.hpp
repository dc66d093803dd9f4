#pragma once

#include <iosfwd>

namespace vscreen {

/// Entry point of the vscreen command. Returns the process exit code:
/// 0 success, 1 invalid arguments or data, 2 I/O or parse failure,
/// 3 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vscreen
