#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "secpol/env/actions.hpp"
#include "secpol/env/candidates.hpp"
#include "secpol/env/features.hpp"
#include "secpol/env/reward.hpp"
#include "secpol/policy/guardrails.hpp"
#include "secpol/world/compliance.hpp"
#include "secpol/world/sampler.hpp"
#include "secpol/world/world.hpp"

namespace secpol {

struct EnvConfig {
    int episode_len = 720;
    int window = 12;
    TopologyConfig topology = TopologyConfig::default_topology();
    ScenarioMix mix;
    RewardConfig rewards;
    GuardrailSet guardrails;

    void validate() const;  // throws std::invalid_argument
};

struct StepInfo {
    RewardBreakdown breakdown;
    std::vector<IncidentRecord> incidents;
    std::set<ComplianceId> violations;  // after the step
    int config_version = 0;
    ConcreteAction applied;             // what actually ran (NoOp on fallback)
    bool fallback = false;              // empty slot or guardrail rejection
    std::optional<GuardrailId> guardrail;
    bool changed = false;               // the agent's action changed the config
    std::vector<std::string> hit_attacks;  // attack scenarios whose entity the action targeted
    std::vector<std::string> hit_benign;   // benign scenarios whose entity the action targeted
    bool false_positive = false;
    int violations_fixed = 0;
    int violations_introduced = 0;
};

struct Transition {
    StateVector s{};
    ActionId a = 0;  // -1 for a direct concrete action
    double r = 0.0;
    StateVector s_next{};
    bool done = false;
    StepInfo info;
};

class EnvError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// reset/step protocol over one world and its configuration.
class SecurityEnv {
public:
    explicit SecurityEnv(EnvConfig config = {});

    /// Fresh world and baseline config with scenarios drawn from the current mix.
    StateVector reset(std::uint64_t seed);
    /// Same with an explicit scenario set and optional replay trace.
    StateVector reset_with(std::uint64_t seed, std::vector<ScenarioScript> scripts,
                           std::vector<SecurityEvent> trace = {});

    /// decode, guardrail check, apply, world step, features, reward.
    /// Throws EnvError once the episode is done.
    Transition step(ActionId a);
    /// Same, bypassing the slot tables (used by scripted agents).
    Transition step_concrete(const ConcreteAction& a);

    void set_mix(const ScenarioMix& mix) { config_.mix = mix; }
    void set_rewards(const RewardConfig& rc);
    /// Takes effect at the next reset.
    void set_episode_len(int n);

    const EnvConfig& config() const { return config_; }
    const World& world() const { return world_; }
    const SecurityConfig& security_config() const { return sec_; }
    const SlotTables& slot_tables() const { return tables_; }
    const StateVector& state() const { return state_; }
    const EventWindow& window() const { return window_; }
    int step_count() const { return world_.current_step(); }
    bool done() const { return done_; }

private:
    Transition advance(const ConcreteAction& a, bool fallback, ActionId id);
    void observe_world();

    EnvConfig config_;
    World world_;
    SecurityConfig sec_;
    EventWindow window_;
    SlotTables tables_;
    StateVector state_{};
    FeatureContext ctx_;
    bool done_ = true;
};

}  // namespace secpol
