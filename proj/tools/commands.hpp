#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lcurve::cli {

/// Runs one command line (args[0] is the program name). Results go to `out`,
/// the single-line error report to `err`. Returns the process exit status:
/// 0 success, 2 input error, 3 numerical failure, 4 infeasible plan.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lcurve::cli
