#pragma once

#include <iosfwd>

namespace molchan::cli {

/// Entry point of the `molchan` tool. Returns 0 on success, 1 on domain and
/// estimation errors, 2 on usage errors.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace molchan::cli
