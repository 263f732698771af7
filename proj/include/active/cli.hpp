#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace active::cli {

// Exit codes: 0 ok (and --help), 2 usage or configuration error, 3 bad input
// data, 4 numerical failure.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace active::cli
