// tools/cli.hpp - mdmc command-line driver, callable in-process
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mdmc
{

/// Exit codes: 0 success, 1 semantic or validation failure, 2 usage, I/O or parse failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSemantic = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. `args` excludes the program name.
int run_cli(const std::vector<std::string> & args, std::ostream & out, std::ostream & err);

}  // namespace mdmc
