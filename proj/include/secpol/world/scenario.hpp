#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "secpol/policy/config.hpp"
#include "secpol/world/events.hpp"

namespace secpol {

enum class ScenarioKind { PortScan, DDoS, WebExploit, CredCompromise, BenignAdminBurst, ConfigDrift };
enum class ScenarioStatus { Pending, Active, Neutralized, Breached, Expired };

inline constexpr int kScenarioKindCount = 6;

const char* to_string(ScenarioKind k);
const char* to_string(ScenarioStatus s);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view s);

/// Attacks are the truth-malicious kinds; BenignAdminBurst is truth-benign and
/// ConfigDrift is a compliance event (neither).
bool is_attack(ScenarioKind k);
bool is_concluded(ScenarioStatus s);

/// How a scenario is stopped by configuration.
enum class NeutralizeRule {
    SourceDeniedOrTargetIsolated,
    SourcesDeniedFraction,
    SourceDenied,
    PrincipalRestricted,
    RuleRemoved,
    Never,
};

struct EmissionSpec {
    EventKind kind = EventKind::NetFlow;
    std::vector<Signature> signatures{Signature::None};  // cycled per event
    int rate = 1;                                        // events per step
    double anomaly_start = 0.5;
    double anomaly_slope = 0.0;  // per step since stage start
    std::vector<int> ports;      // cycled destination ports (NetFlow)
    std::string api_name;        // ApiCall
    bool disable_logging = false;    // one-shot ConfigChange at stage start
    bool insert_drift_rule = false;  // one-shot ConfigChange at stage start
    bool operator==(const EmissionSpec&) const = default;
};

struct Stage {
    int offset = 0;
    EmissionSpec emission;
    bool operator==(const Stage&) const = default;
};

class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ScenarioScript {
    std::string id;
    ScenarioKind kind = ScenarioKind::PortScan;
    int onset = 0;
    std::vector<Stage> stages;              // strictly increasing offsets
    std::optional<int> breach_deadline;     // offset from onset
    std::optional<int> expire_after;        // offset from onset
    bool baseline_blockable = false;
    NeutralizeRule neutralize = NeutralizeRule::SourceDenied;
    double neutralize_fraction = 0.75;
    bool monitoring_extends_deadline = false;

    std::vector<std::string> sources;  // attacker addresses
    std::string target;                // instance id
    std::string principal;
    Zone logging_zone = Zone::Private;
    FirewallRule drift_rule;

    bool truth_malicious() const { return is_attack(kind); }
    /// Union of destination ports across all stages.
    std::vector<int> ports() const;
    void validate() const;  // throws ScenarioError
    bool operator==(const ScenarioScript&) const = default;
};

struct ScenarioTargets {
    std::vector<std::string> sources;
    std::string target;
    std::string principal;
    Zone logging_zone = Zone::Private;
    bool baseline_blockable = false;
};

/// Default dynamics per kind:
///   PortScan        5 scan flows/step, exploit stage at +12, breach at +24
///   DDoS            8 sources in one /24, breach at +18 unless >=75% denied
///   WebExploit      sqli/xss flows, breach at +20 (doubled at monitoring 2)
///   CredCompromise  privesc API calls, logging disabled at +4, breach at +20
///   BenignAdminBurst 40-step admin burst at anomaly ~0.6
///   ConfigDrift     inserts Allow 0.0.0.0/0:22 at onset
ScenarioScript make_default_script(ScenarioKind kind, std::string id, int onset,
                                   const ScenarioTargets& targets);

}  // namespace secpol
