// SPDX-License-Identifier: MIT
#pragma once

#include <ostream>

namespace normbridge::cli {

/// Runs one command line; returns the process exit code
/// (0 ok, 2 usage, 3 infeasible model, 4 capacity).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace normbridge::cli
