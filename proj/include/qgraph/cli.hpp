#pragma once

#include <iosfwd>
#include <vector>

namespace qgraph {

// Full command-line entry point; returns the process exit status:
// 0 success, 1 numerical failure, 2 input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qgraph
