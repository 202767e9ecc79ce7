#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "secpol/world/scenario.hpp"

namespace secpol {

inline constexpr double kSecondsPerStep = 5.0;

struct ScenarioStats {
    std::string id;
    ScenarioKind kind = ScenarioKind::PortScan;
    bool baseline_blockable = false;
    ScenarioStatus outcome = ScenarioStatus::Pending;
    std::optional<int> first_event_step;
    std::optional<int> concluded_step;
    bool targeted = false;  // received at least one defensive action aimed at its entity
};

struct EpisodeStats {
    std::uint64_t seed = 0;
    int steps = 0;
    int episode_len = 0;
    double episode_return = 0.0;
    int config_changes = 0;     // agent changes
    int false_positive_actions = 0;
    int violations_at_end = 0;
    double resource_cost = 0.0;  // mean monitoring units per step
    std::vector<ScenarioStats> scenarios;
};

/// Undefined values (division by zero) are empty optionals.
struct MetricsReport {
    std::string name;
    std::optional<double> mitigation_rate;
    std::optional<double> tpr;
    std::optional<double> fpr;
    std::optional<double> response_median_s;
    std::optional<double> response_p90_s;
    std::optional<double> policy_updates_per_hour;
    std::optional<double> policy_updates_per_day;
    std::optional<double> outstanding_compliance;
    std::optional<double> overhead_index;
    int episodes = 0;
    int seeds = 0;
    int neutralized = 0;
    int breached = 0;

    bool operator==(const MetricsReport&) const = default;
};

using ScenarioFilter = std::function<bool(const ScenarioStats&)>;

/// Scenario-level rates use only scenarios accepted by `filter`:
///   mitigation = Neutralized / (Neutralized + Breached) over attacks
///   tpr        = attacks that received a correct-target defensive action
///   fpr        = benign scenarios that received a defensive action
///   response   = (concluded - first observable event) * 5 s over Neutralized
///                scenarios that produced an observable event
std::optional<double> median(std::vector<double> v);
std::optional<double> percentile(std::vector<double> v, double q);

MetricsReport compute_metrics(std::span<const EpisodeStats> episodes, const ScenarioFilter& filter = {});

}  // namespace secpol
