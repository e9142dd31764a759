#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hnn {

// Exit codes of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInputError = 2;

// args excludes the program name, e.g. {"moment", "--scenario", "bs23.json", "--expr", "t1"}.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hnn
