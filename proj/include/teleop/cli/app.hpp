#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace teleop::cli {

/// Exit codes: 0 success, 1 tolerance or scenario failure, 2 usage or config error.
int run(int argc, const char* const* argv);
/// Same as above with explicit streams; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Sets the spdlog level from TELEOP_LOG (trace, debug, info, warn, error, off); logs go to stderr.
void init_logging();

}  // namespace teleop::cli
