#include "secpol/env/reward.hpp"

#include <cmath>
#include <string>

namespace secpol {

void RewardConfig::validate() const {
    const auto need = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("reward config: ") + what);
    };
    const double all[] = {r1, r2, r3, r4, step_attack_penalty, stability_bonus, resource_rate, change_cost,
                          fp_disruption_penalty, invalid_action_penalty};
    for (double v : all) need(std::isfinite(v), "values must be finite");
    need(r1 >= 0 && r3 >= 0 && stability_bonus >= 0, "r1, r3 and stability_bonus must be >= 0");
    need(r2 >= 0 && r4 >= 0 && step_attack_penalty >= 0 && resource_rate >= 0 && change_cost >= 0 &&
             fp_disruption_penalty >= 0 && invalid_action_penalty >= 0,
         "penalty magnitudes must be >= 0");
    need(r2 >= r1, "r2 must be >= r1");
    need(r4 >= r3, "r4 must be >= r3");
    need(r2 > 0, "r2 must be > 0");
    need(r1 > change_cost, "r1 must exceed change_cost");
}

double RewardBreakdown::total() const {
    double r = 0.0;
    r += mitigation;
    r += incident;
    r += compliance_fix;
    r += compliance_violation;
    r += resource;
    r += change;
    r += stability;
    r += attack_step;
    r += false_positive;
    r += invalid;
    return r;
}

RewardBreakdown compute_reward(const StepOutcome& o, const RewardConfig& rc) {
    RewardBreakdown b;
    b.mitigation = rc.r1 * o.neutralized_by_agent;
    b.incident = -rc.r2 * o.breaches;
    b.compliance_fix = rc.r3 * o.violations_fixed;
    b.compliance_violation = -rc.r4 * o.violations_introduced;
    b.resource = -rc.resource_rate * o.monitoring_units;
    b.change = -rc.change_cost * o.config_changes;
    b.stability = o.stable ? rc.stability_bonus : 0.0;
    b.attack_step = -rc.step_attack_penalty * o.active_attacks;
    b.false_positive = -rc.fp_disruption_penalty * o.false_positives;
    b.invalid = o.invalid_action ? -rc.invalid_action_penalty : 0.0;
    return b;
}

}  // namespace secpol
