#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lrmc::cli {

// Entry point of the lrmc tool, factored out of main() so tests can drive it
// in process.  `args` excludes the program name.  Returns the process exit
// code: 0 on success, 1 on usage or input errors, 2 when a solve gave up.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace lrmc::cli
