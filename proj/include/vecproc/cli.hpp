#pragma once

#include <string>
#include <vector>

namespace vecproc {

/// Exit codes: 0 all checks passed, 1 internal error, 2 invalid input,
/// 3 the run completed but at least one check failed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitCheckFailed = 3;

/// args excludes the program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace vecproc
