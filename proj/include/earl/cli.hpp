#pragma once

#include <string>
#include <vector>

namespace earl {

// Command-line entry point (arguments exclude the program name). Returns the
// process exit code: 0 success, 2 configuration error (nothing written),
// 3 runtime failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace earl
