#pragma once

#include <array>
#include <vector>

#include "secpol/common/rng.hpp"
#include "secpol/world/scenario.hpp"
#include "secpol/world/topology.hpp"

namespace secpol {

/// Distribution over scenario sets for one episode.
struct ScenarioMix {
    /// Sampling weight per ScenarioKind (indexed by the enum value).
    std::array<double, kScenarioKindCount> weights{1, 1, 1, 1, 0, 0};
    /// Kinds included in every episode before weighted draws.
    std::vector<ScenarioKind> always;
    int min_count = 1;
    int max_count = 1;
    /// Fraction of sampled attacks aimed at paths the baseline already blocks.
    double baseline_blockable_fraction = 0.70;
    /// Attack and burst onsets share a base step in [onset_min, episode_len -
    /// onset_tail] and each adds a uniform jitter in [0, onset_jitter].
    /// ConfigDrift draws its own step from the same range.
    int onset_min = 20;
    int onset_tail = 100;
    int onset_jitter = 10;

    void validate() const;  // throws ScenarioError
};

ScenarioMix single_attack_mix();
ScenarioMix multi_threat_mix();
ScenarioMix full_mix();

/// Draws distinct kinds according to `mix` and builds default scripts with
/// concrete sources and targets for `topology`.
std::vector<ScenarioScript> sample_scenarios(const ScenarioMix& mix, const TopologyConfig& topology,
                                             int episode_len, Rng& rng);

}  // namespace secpol
