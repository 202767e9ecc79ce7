#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "secpol/policy/cidr.hpp"

namespace secpol {

enum class Direction { Ingress, Egress };
enum class Verb { Allow, Deny };
enum class RuleOrigin { Baseline, Agent, Drift };
enum class Tier { Web, Db };
enum class Zone { Public, Private };
enum class Privilege { ReadOnly, PowerUser, Admin };
enum class Actor { Agent, Baseline, Drift };

const char* to_string(Direction d);
const char* to_string(Verb v);
const char* to_string(RuleOrigin o);
const char* to_string(Tier t);
const char* to_string(Zone z);
const char* to_string(Privilege p);
const char* to_string(Actor a);

std::optional<Tier> parse_tier(std::string_view s);
std::optional<Zone> parse_zone(std::string_view s);
std::optional<Privilege> parse_privilege(std::string_view s);

/// Address block of the simulated VPC; everything outside it is "the internet".
inline const Cidr kVpcCidr(0x0a000000u, 16);  // 10.0.0.0/16
inline constexpr int kDbPort = 3306;
inline constexpr int kSshPort = 22;
inline constexpr int kMaxMonitoringLevel = 2;

struct FirewallRule {
    int id = 0;
    Direction direction = Direction::Ingress;
    Cidr source;
    PortRange ports;
    Verb verb = Verb::Allow;
    RuleOrigin origin = RuleOrigin::Baseline;

    bool same_match(const FirewallRule& o) const {
        return direction == o.direction && source == o.source && ports == o.ports;
    }
    bool operator==(const FirewallRule&) const = default;
};

struct PrincipalPolicy {
    Privilege privilege = Privilege::ReadOnly;
    bool restricted = false;
    bool operator==(const PrincipalPolicy&) const = default;
};

struct InstanceControl {
    Tier tier = Tier::Web;
    Zone zone = Zone::Public;
    bool isolated = false;
    int monitoring = 1;
    int baseline_monitoring = 1;
    bool operator==(const InstanceControl&) const = default;
};

/// The policy content proper: everything a change can touch.
struct PolicyState {
    std::vector<FirewallRule> rules;  // ascending id
    std::map<std::string, PrincipalPolicy> principals;
    std::map<std::string, InstanceControl> instances;
    std::map<Zone, bool> flow_logging;
    int next_rule_id = 1;

    const FirewallRule* find_rule(int id) const;
    /// Deny-wins: an ingress flow is denied iff some ingress Deny covers (addr, port).
    bool ingress_denied(std::uint32_t addr, int port) const;
    /// True iff an ingress Deny covers addr on every port of `ports`.
    bool ingress_denied(std::uint32_t addr, const PortRange& ports) const;
    int monitoring_units() const;

    bool operator==(const PolicyState&) const = default;
};

namespace action {
struct NoOp {
    bool operator==(const NoOp&) const = default;
};
/// Insert an ingress Deny for `source` on all ports.
struct BlockSource {
    Cidr source;
    bool operator==(const BlockSource&) const = default;
};
/// Remove a non-compliant Allow rule (BlockTraffic aimed at an open rule).
struct RevokeRule {
    int rule_id = 0;
    bool operator==(const RevokeRule&) const = default;
};
struct RestrictPrincipal {
    std::string principal;
    bool operator==(const RestrictPrincipal&) const = default;
};
/// Remove an agent-added Deny rule.
struct OpenPort {
    int rule_id = 0;
    bool operator==(const OpenPort&) const = default;
};
struct IsolateInstance {
    std::string instance;
    bool operator==(const IsolateInstance&) const = default;
};
struct RaiseMonitoring {
    std::string instance;
    bool operator==(const RaiseMonitoring&) const = default;
};
struct EnableFlowLogging {
    Zone zone = Zone::Public;
    bool operator==(const EnableFlowLogging&) const = default;
};
/// Drift-only: add an arbitrary rule. The id field is assigned on apply.
struct InsertRule {
    FirewallRule rule;
    bool operator==(const InsertRule&) const = default;
};
/// Drift-only.
struct DisableFlowLogging {
    Zone zone = Zone::Public;
    bool operator==(const DisableFlowLogging&) const = default;
};
struct Rollback {
    int target_version = 0;
    bool operator==(const Rollback&) const = default;
};
}  // namespace action

using ConcreteAction =
    std::variant<action::NoOp, action::BlockSource, action::RevokeRule, action::RestrictPrincipal,
                 action::OpenPort, action::IsolateInstance, action::RaiseMonitoring,
                 action::EnableFlowLogging, action::InsertRule, action::DisableFlowLogging,
                 action::Rollback>;

std::string describe(const ConcreteAction& a);

/// Defensive actions disrupt the entity they target (used for false-positive accounting).
bool is_defensive(const ConcreteAction& a);

struct PolicyChange {
    int step = 0;
    Actor actor = Actor::Agent;
    ConcreteAction action;
    int pre_version = 0;
    int post_version = 0;
    bool operator==(const PolicyChange&) const = default;
};

/// Versioned security configuration. Every applied change bumps the version by
/// one and is appended to the change log; the origin snapshot lets any
/// historical version be rebuilt by replay.
struct SecurityConfig {
    PolicyState state;
    int version = 0;
    int initial_version = 0;
    std::vector<PolicyChange> change_log;
    std::shared_ptr<const PolicyState> origin;

    explicit SecurityConfig(PolicyState initial = {}, int initial_version = 0);
};

class PolicyError : public std::runtime_error {
public:
    enum class Kind { TargetNotFound, UnknownVersion, Malformed };
    PolicyError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Applies `a` to `state` in place. Throws PolicyError(TargetNotFound) when the
/// target does not exist. Rollback is not handled here (needs history).
void mutate(PolicyState& state, const ConcreteAction& a);

/// Rebuilds the policy state as it was at `version`.
PolicyState state_at(const SecurityConfig& config, int version);

/// Canonical, byte-stable text form; rules sorted by match tuple then id.
std::string to_canonical_text(const SecurityConfig& config);

enum class DiffKind { Added, Removed, Modified };

struct FieldChange {
    DiffKind kind;
    std::string path;
    std::string before;
    std::string after;
    bool operator==(const FieldChange&) const = default;
};

/// Field-level differences from `a` to `b`, ignoring version and change log.
std::vector<FieldChange> config_diff(const SecurityConfig& a, const SecurityConfig& b);
std::vector<FieldChange> config_diff(const PolicyState& a, const PolicyState& b);

}  // namespace secpol
