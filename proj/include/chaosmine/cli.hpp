#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace chaosmine {

// Runs the command line tool on `args` (program name excluded). Returns the
// process exit status: 0 on success, 2 for usage errors, 1 otherwise. Errors
// are reported on `err` as a single line "error: <code>: <message>".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace chaosmine
