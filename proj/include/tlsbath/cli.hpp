#pragma once

#include <iosfwd>

namespace tlsbath {

enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,
    exit_config = 2,
    exit_fit = 3,
    exit_numeric = 4,
};

/// Entry point of the `tlsbath` command line tool. Diagnostics go to `err`,
/// short summaries to `out`; data is written under --out.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tlsbath
