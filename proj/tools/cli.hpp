#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fudge::cli {

/// Runs one command line (args exclude the program name). Returns the exit
/// code: 0 success, 2 input validation, 3 embedding resolution, 4 path
/// explosion.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fudge::cli
