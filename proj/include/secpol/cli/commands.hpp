#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace secpol {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Environment variable that overrides output.run_root for `train`.
inline constexpr const char* kRunRootEnv = "SECPOL_RUN_ROOT";

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Subcommands:
///
///     train  [config] [--agent dqn|ppo] [--seed N] [--steps N] [--workers N] [--out DIR]
///     eval   [checkpoint] [config] [--baseline static|ml-human] [--episodes N] [--seed N] [--out DIR]
///     report FILE... [--format md|csv|both] [--out PREFIX]
///     replay TRACE [config] [--seed N] [--out FILE]
///
/// Returns 0 on success, 1 on a usage error and 2 on a data error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace secpol
