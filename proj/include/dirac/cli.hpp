#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dirac {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitEngine = 3;
inline constexpr int kExitDomainExit = 4;

// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dirac
