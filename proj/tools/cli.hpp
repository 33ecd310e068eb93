#pragma once

// Command-line front end. run() is the whole program minus process plumbing,
// so tests can drive it with captured streams.

#include <iosfwd>
#include <string>
#include <vector>

namespace klext::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kInvalid = 2,
  kResource = 3,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace klext::cli
