#pragma once

#include <ostream>

namespace moscale::cli {

// Exit codes: 0 success, 1 compute error, 2 invalid flags or config.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace moscale::cli
