#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cexp::cli {

// Runs the command-line tool. Results go to `out` (or the --out file),
// errors to `err` as a JSON object. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cexp::cli
