#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>

#include "secpol/rl/dqn.hpp"
#include "secpol/rl/ppo.hpp"

namespace secpol {

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class AgentKind { Dqn, Ppo };
const char* to_string(AgentKind k);

/// Binary container: magic "SECPOLCK", format version, agent kind, feature
/// and action counts, global step, then networks and optimizer state.
void save_checkpoint(const std::filesystem::path& path, const DqnAgent& agent);
void save_checkpoint(const std::filesystem::path& path, const PpoAgent& agent);

using LoadedAgent = std::variant<DqnAgent, PpoAgent>;

/// Throws CheckpointError on a bad file or when the stored feature/action
/// dimensions differ from this build's.
LoadedAgent load_checkpoint(const std::filesystem::path& path);

}  // namespace secpol
