#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spud::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_data = 2,
    exit_divergence = 3,
};

/// Runs one invocation. `args` excludes the program name. Results go to `out`;
/// the resolved configuration, warnings and errors go to `err`.
int dispatch(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace spud::cli
