#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cmak::cli {

/// Runs one command line (without the program name). Success summaries go to `out` as JSON; failures
/// write {"error": {"code", "message"}} to `err` and return nonzero (2 usage/config, 3 I/O, 1 otherwise).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmak::cli
