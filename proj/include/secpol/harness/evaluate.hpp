#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "secpol/env/env.hpp"
#include "secpol/env/episode_log.hpp"
#include "secpol/harness/agents.hpp"
#include "secpol/harness/metrics.hpp"

namespace secpol {

/// Plays one episode on an environment that has already been reset.
EpisodeStats run_episode(Agent& agent, SecurityEnv& env, std::uint64_t seed = 0,
                         EpisodeLogWriter* log = nullptr);

/// Held-out episodes: episode i is reset with derive_seed(seed, i).
struct EvalSuite {
    std::string name = "heldout";
    ScenarioMix mix = full_mix();
    int episodes = 200;
    std::uint64_t seed = 424242;
};

struct EvalResult {
    MetricsReport report;
    std::vector<EpisodeStats> episodes;
};

EvalResult evaluate(Agent& agent, const EnvConfig& env_config, const EvalSuite& suite);

}  // namespace secpol
