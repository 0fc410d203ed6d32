#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace noveldetect {

/// Entry point of the `noveldetect` tool. `args` excludes the program name.
/// Returns the process exit code: 0 on success, 1 on runtime errors, 2 on
/// usage errors. Diagnostics go to `err`; data goes to files or `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace noveldetect
