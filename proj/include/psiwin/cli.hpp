#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace psiwin::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Runs `psiwin <subcommand> [flags]`; args excludes the program name.
/// Returns 0 on success, 2 on usage errors and 1 on runtime failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace psiwin::cli
