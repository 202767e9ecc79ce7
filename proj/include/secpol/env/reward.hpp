#pragma once

#include <stdexcept>

namespace secpol {

struct RewardConfig {
    double r1 = 10.0;   // attack neutralized by the agent
    double r2 = 100.0;  // incident (breach)
    double r3 = 5.0;    // violation fixed
    double r4 = 20.0;   // violation introduced by the agent
    double step_attack_penalty = 0.2;
    double stability_bonus = 0.05;
    double resource_rate = 0.01;  // per monitoring unit per step
    double change_cost = 0.5;
    double fp_disruption_penalty = 15.0;
    double invalid_action_penalty = 0.1;

    /// Throws std::invalid_argument naming the first broken constraint.
    void validate() const;
};

/// What happened during one step, as far as the reward is concerned.
struct StepOutcome {
    int neutralized_by_agent = 0;
    int breaches = 0;
    int violations_fixed = 0;
    int violations_introduced = 0;
    int monitoring_units = 0;
    int config_changes = 0;
    bool stable = false;  // no active attack, no violation, no change, no breach
    int active_attacks = 0;
    int false_positives = 0;
    bool invalid_action = false;
};

struct RewardBreakdown {
    double mitigation = 0.0;
    double incident = 0.0;
    double compliance_fix = 0.0;
    double compliance_violation = 0.0;
    double resource = 0.0;
    double change = 0.0;
    double stability = 0.0;
    double attack_step = 0.0;
    double false_positive = 0.0;
    double invalid = 0.0;

    /// Sum in a fixed order; the step reward is defined as this value.
    double total() const;
    bool operator==(const RewardBreakdown&) const = default;
};

RewardBreakdown compute_reward(const StepOutcome& o, const RewardConfig& rc);

}  // namespace secpol
