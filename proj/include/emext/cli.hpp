#pragma once

#include <string>
#include <vector>

namespace emext {

/* Runs one command; stdout/stderr text via the out parameters.
 * Exit codes: 0 ok, 1 usage/parse, 2 computation, 3 internal invariant. */
int run_cli(const std::vector<std::string>& args, std::string& out, std::string& err);

extern const char* const kToolVersion;

}  // namespace emext
