#pragma once

#include <ostream>

namespace simion {

/// Exit codes: 0 success, 1 corpus or configuration error, 2 invariant violation.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace simion
