#pragma once

#include <string>
#include <vector>

namespace tsptw::cli {

// Exit codes: 0 success, 2 validation error (bad flags, config, inputs),
// 1 internal error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace tsptw::cli
