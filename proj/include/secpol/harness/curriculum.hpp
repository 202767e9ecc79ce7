#pragma once

#include <optional>
#include <string>
#include <vector>

#include "secpol/env/reward.hpp"
#include "secpol/world/sampler.hpp"

namespace secpol {

struct CurriculumPhase {
    std::string name;
    ScenarioMix mix;
    int episodes = 0;  // 0 = until the step budget runs out (last phase only)
    std::optional<RewardConfig> rewards;
    /// Training episode length for this phase (defaults to the env's).
    std::optional<int> episode_len;
};

struct Curriculum {
    std::vector<CurriculumPhase> phases;

    /// single-attack (60 episodes, r1 = 20), multi-threat (100 episodes,
    /// ConfigDrift plus one or two attacks), full (adds BenignAdminBurst).
    /// `train_blockable` sets the baseline-blockable fraction during training,
    /// `episode_len` the length of training episodes (0 keeps the env's) and
    /// `onset_tail` the scenario onset tail of every phase mix. Short training
    /// episodes need a short tail so onsets cover the whole episode.
    static Curriculum defaults(double train_blockable = 0.2, int episode_len = 240, int onset_tail = 30);

    /// Index of the phase in force after `completed` episodes.
    std::size_t phase_for(long completed) const;
    void validate() const;  // throws std::invalid_argument
};

}  // namespace secpol
