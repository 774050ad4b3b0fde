#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace orbmod {

/// Exit codes: 0 success, 1 invalid input (flags, config, specs), 2
/// numerical failure or a flow that did not converge.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orbmod
