#pragma once

#include <string>
#include <vector>

namespace planlearn {

// Command-line front end. Subcommands: learn, inject-noise, evaluate,
// validate, xval, gen-traces, inspect-dataset. Returns the process exit code:
// 0 success, 1 pipeline error, 2 usage error, 3 I/O error. Deterministic
// given --seed: identical invocations produce byte-identical outputs.
int run_cli(const std::vector<std::string>& args);

}  // namespace planlearn
