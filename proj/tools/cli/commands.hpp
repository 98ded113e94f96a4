#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pansharp::cli {

/// Process exit codes.
enum ExitCode : int {
    exit_ok = 0,
    /// Usage error or a failure that produced no output.
    exit_failure = 1,
    /// Some requested items failed; per-item error records were emitted.
    exit_partial = 2,
};

/// Runs one CLI invocation. `args` excludes the program name.
///
/// Subcommands: recolor, metrics, caploss, weights, filter-dataset, extract-features.
/// `--config FILE` reads flat `key = value` lines naming long flags; flags given
/// on the command line take precedence.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pansharp::cli
