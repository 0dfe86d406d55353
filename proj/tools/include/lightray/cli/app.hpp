#pragma once

#include <iosfwd>
#include <string>

namespace lightray::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitStageFailure = 1;
inline constexpr int kExitUsage = 2;

// git-describe-style version baked in at configure time.
std::string version();

// Entry point of the `lightray` executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lightray::cli
