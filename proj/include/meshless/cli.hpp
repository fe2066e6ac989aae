#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace meshless {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDivergence = 2;
inline constexpr int kExitVerifyFailed = 3;

/// Entry point of the meshless_growth tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace meshless
