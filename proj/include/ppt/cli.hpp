#pragma once

#include <iosfwd>

namespace ppt::cli {

// Exit codes: 0 success, 1 validation failure (or nothing found), 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ppt::cli
