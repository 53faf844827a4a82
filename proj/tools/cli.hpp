#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coill::cli {

/// Runs one command line (without the program name). Returns the exit code:
/// 0 on success, 1 when the kernel reports a failure, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coill::cli
