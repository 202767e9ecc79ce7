#include "secpol/world/compliance.hpp"

#include <algorithm>

namespace secpol {

const char* to_string(ComplianceId c) {
    switch (c) {
        case ComplianceId::C1: return "C1";
        case ComplianceId::C2: return "C2";
        case ComplianceId::C3: return "C3";
        case ComplianceId::C4: return "C4";
    }
    return "?";
}

bool is_c1_violating_rule(const FirewallRule& r) {
    return r.direction == Direction::Ingress && r.verb == Verb::Allow && r.source == Cidr::any() &&
           r.ports.contains(kSshPort);
}

bool c1_violated(const PolicyState& s) {
    return std::any_of(s.rules.begin(), s.rules.end(), is_c1_violating_rule);
}

bool c2_violated(const PolicyState& s) {
    return std::any_of(s.flow_logging.begin(), s.flow_logging.end(), [](const auto& kv) { return !kv.second; });
}

bool c3_violated(const PolicyState& s) {
    bool any_db = false;
    for (const auto& [id, inst] : s.instances) {
        if (inst.tier != Tier::Db) continue;
        any_db = true;
        if (inst.zone == Zone::Public) return true;
    }
    if (!any_db) return false;
    // Reachable from outside the VPC: some Allow on the DB port whose source is
    // not fully covered by the VPC block plus the covering denies.
    std::vector<Cidr> cover{kVpcCidr};
    for (const auto& r : s.rules) {
        if (r.direction == Direction::Ingress && r.verb == Verb::Deny && r.ports.contains(kDbPort)) {
            cover.push_back(r.source);
        }
    }
    return std::any_of(s.rules.begin(), s.rules.end(), [&](const FirewallRule& r) {
        return r.direction == Direction::Ingress && r.verb == Verb::Allow && r.ports.contains(kDbPort) &&
               !covered_by_union(r.source, cover);
    });
}

bool c4_violated(const PolicyState& s) {
    return std::any_of(s.instances.begin(), s.instances.end(), [](const auto& kv) {
        return kv.second.tier == Tier::Web && kv.second.monitoring < 1;
    });
}

std::set<ComplianceId> default_violations(const PolicyState& s) {
    std::set<ComplianceId> out;
    if (c1_violated(s)) out.insert(ComplianceId::C1);
    if (c2_violated(s)) out.insert(ComplianceId::C2);
    if (c3_violated(s)) out.insert(ComplianceId::C3);
    if (c4_violated(s)) out.insert(ComplianceId::C4);
    return out;
}

const std::vector<ComplianceRule>& default_compliance_rules() {
    static const std::vector<ComplianceRule> rules{
        {ComplianceId::C1, "no Allow rule from 0.0.0.0/0 covering port 22",
         [](const SecurityConfig& c, const World&) { return c1_violated(c.state); }},
        {ComplianceId::C2, "flow logging enabled in every zone",
         [](const SecurityConfig& c, const World&) { return c2_violated(c.state); }},
        {ComplianceId::C3, "database instances unreachable from outside the VPC",
         [](const SecurityConfig& c, const World&) { return c3_violated(c.state); }},
        {ComplianceId::C4, "monitoring level >= 1 on every web instance",
         [](const SecurityConfig& c, const World&) { return c4_violated(c.state); }},
    };
    return rules;
}

std::set<ComplianceId> evaluate_compliance(const SecurityConfig& config, const World& world,
                                           std::span<const ComplianceRule> rules) {
    std::set<ComplianceId> out;
    for (const auto& r : rules) {
        if (r.violated(config, world)) out.insert(r.id);
    }
    return out;
}

}  // namespace secpol
