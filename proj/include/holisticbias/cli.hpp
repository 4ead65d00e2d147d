#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hb {

/// Entry point of the `hb` tool. `args` excludes the program name. Reports
/// go to `out`, diagnostics to `err`; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace hb
