#include "secpol/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace secpol {

std::optional<double> percentile(std::vector<double> v, double q) {
    if (v.empty()) return std::nullopt;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + (v[hi] - v[lo]) * frac;
}

std::optional<double> median(std::vector<double> v) { return percentile(std::move(v), 0.5); }

MetricsReport compute_metrics(std::span<const EpisodeStats> episodes, const ScenarioFilter& filter) {
    MetricsReport m;
    m.episodes = static_cast<int>(episodes.size());
    std::set<std::uint64_t> seeds;
    int attacks = 0, hit_attacks = 0, benign = 0, hit_benign = 0;
    std::vector<double> response;
    double changes = 0.0, violations = 0.0, resource = 0.0;
    double hours = 0.0;
    for (const auto& e : episodes) {
        seeds.insert(e.seed);
        changes += e.config_changes;
        violations += e.violations_at_end;
        resource += e.resource_cost;
        hours += e.episode_len * kSecondsPerStep / 3600.0;
        for (const auto& s : e.scenarios) {
            if (filter && !filter(s)) continue;
            if (is_attack(s.kind)) {
                ++attacks;
                if (s.targeted) ++hit_attacks;
                if (s.outcome == ScenarioStatus::Neutralized) ++m.neutralized;
                if (s.outcome == ScenarioStatus::Breached) ++m.breached;
            } else if (s.kind == ScenarioKind::BenignAdminBurst) {
                ++benign;
                if (s.targeted) ++hit_benign;
            }
            if (s.outcome == ScenarioStatus::Neutralized && s.first_event_step && s.concluded_step &&
                s.kind != ScenarioKind::BenignAdminBurst) {
                response.push_back((*s.concluded_step - *s.first_event_step) * kSecondsPerStep);
            }
        }
    }
    m.seeds = static_cast<int>(seeds.size());
    if (m.neutralized + m.breached > 0) {
        m.mitigation_rate = static_cast<double>(m.neutralized) / (m.neutralized + m.breached);
    }
    if (attacks > 0) m.tpr = static_cast<double>(hit_attacks) / attacks;
    if (benign > 0) m.fpr = static_cast<double>(hit_benign) / benign;
    m.response_median_s = median(response);
    m.response_p90_s = percentile(response, 0.9);
    if (!episodes.empty()) {
        const double n = static_cast<double>(episodes.size());
        if (hours > 0.0) {
            m.policy_updates_per_hour = changes / hours;
            m.policy_updates_per_day = changes / hours * 24.0;
        }
        m.outstanding_compliance = violations / n;
        m.overhead_index = resource / n;
    }
    return m;
}

}  // namespace secpol
