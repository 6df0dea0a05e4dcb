#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dgs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAborted = 1;
inline constexpr int kExitUsage = 2;

// Runs one command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dgs::cli
