#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace awgp::cli {

enum ExitCode : int { ok = 0, validation_failure = 2, numerical_failure = 3 };

/// Runs one command. `args` excludes the program name. Results go to `out`
/// (or to the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace awgp::cli
