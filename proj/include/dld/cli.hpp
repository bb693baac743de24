#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dld/run_config.hpp"

namespace dld::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;  // oracle tolerance exceeded or runtime failure
inline constexpr int kUsage = 2;    // bad flags, config or I/O

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_field(const RunConfig& config, std::ostream& out);
int run_transect(const RunConfig& config, std::ostream& out);
int run_oracle_check(const RunConfig& config, std::ostream& out);

}  // namespace dld::cli
