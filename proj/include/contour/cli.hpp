#pragma once

#include "contour/trace.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace contour {

// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitStalled = 2, kExitMaxIterations = 3 };

int exit_code_for(RunStatus status);

/// Table of iterate, updating point and contour height, one row per record
/// followed by the final point.
void print_summary(std::ostream& out, const TraceFile& trace);

/// Entry point for `run`, `reproduce` and `plotdata`. `args[0]` is the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace contour
