#pragma once

#include <string>
#include <vector>

namespace reyeweb {

/// Run the command-line driver on the given arguments (program name excluded).
/// Exit codes: 0 success, 1 failure, 2 count mismatch, 3 I/O error.
int cli_main(const std::vector<std::string>& args);

}  // namespace reyeweb
