#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "secpol/common/rng.hpp"
#include "secpol/policy/config.hpp"
#include "secpol/world/events.hpp"
#include "secpol/world/scenario.hpp"
#include "secpol/world/topology.hpp"

namespace secpol {

struct Instance {
    std::string id;
    Tier tier = Tier::Web;
    Zone zone = Zone::Public;
    bool isolated = false;
    int monitoring_level = 1;
    bool compromised = false;  // hidden ground truth
    bool operator==(const Instance&) const = default;
};

struct IamPrincipal {
    std::string id;
    Privilege privilege = Privilege::ReadOnly;
    bool restricted = false;
    double anomaly_score = 0.0;  // [0, 1]
    bool compromised = false;    // hidden ground truth
    bool operator==(const IamPrincipal&) const = default;
};

struct IncidentRecord {
    int step = 0;
    std::string scenario_id;
    ScenarioStatus outcome = ScenarioStatus::Neutralized;
    bool operator==(const IncidentRecord&) const = default;
};

struct ScenarioRuntime {
    ScenarioScript script;
    ScenarioStatus status = ScenarioStatus::Pending;
    std::optional<int> first_event_step;
    std::optional<int> concluded_step;
    int drift_rule_id = -1;
    int emitted = 0;
    bool operator==(const ScenarioRuntime&) const = default;
};

struct StepOutput {
    std::vector<SecurityEvent> events;
    std::vector<IncidentRecord> incidents;
};

class WorldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Discrete-time simulation of the deployment. One step is five simulated
/// seconds. The world reads the security configuration every step and writes
/// to it only through drift (actor Drift, guardrails bypassed).
class World {
public:
    World() = default;

    /// Throws TopologyError for invalid topologies.
    static World init(const TopologyConfig& topology, std::uint64_t seed);

    /// Registers a script as Pending. Throws WorldError on duplicate id or past
    /// onset, ScenarioError on a malformed script.
    std::size_t spawn_scenario(ScenarioScript script);

    /// Advances one step: activations, emissions, conclusions, trace replay.
    StepOutput step(SecurityConfig& config);

    ScenarioStatus scenario_status(const std::string& id) const;

    /// Schedules replayed events (origin forced to Replay). Steps must be
    /// non-decreasing and strictly after the current step.
    void inject_trace(std::vector<SecurityEvent> events);

    int current_step() const { return step_; }
    const TopologyConfig& topology() const { return topology_; }
    const std::vector<Instance>& instances() const { return instances_; }
    const std::vector<IamPrincipal>& principals() const { return principals_; }
    const std::vector<ScenarioRuntime>& scenarios() const { return scenarios_; }
    const std::vector<IncidentRecord>& incident_log() const { return incident_log_; }
    const ScenarioRuntime* find_scenario(const std::string& id) const;
    const Instance* find_instance(const std::string& id) const;

    bool operator==(const World&) const = default;

private:
    void sync_from(const PolicyState& s);
    void run_scenario(ScenarioRuntime& sc, SecurityConfig& config, StepOutput& out);
    void emit_stage(ScenarioRuntime& sc, const Stage& stage, int offset, SecurityConfig& config,
                    StepOutput& out);
    void emit_background(const PolicyState& s, StepOutput& out);
    bool flow_blocked(const PolicyState& s, const std::string& source, int port,
                      const std::string& target) const;
    void conclude(ScenarioRuntime& sc, ScenarioStatus status, StepOutput& out);
    double noisy(double base);

    TopologyConfig topology_;
    int step_ = 0;
    std::vector<Instance> instances_;
    std::vector<IamPrincipal> principals_;
    std::vector<ScenarioRuntime> scenarios_;
    std::vector<IncidentRecord> incident_log_;
    std::deque<SecurityEvent> trace_queue_;
    std::vector<std::string> client_pool_;
    Rng rng_;
};

/// True when the script's neutralization condition holds under `s`.
bool neutralize_holds(const ScenarioRuntime& sc, const PolicyState& s);

}  // namespace secpol
