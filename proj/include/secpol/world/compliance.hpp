#pragma once

#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "secpol/policy/config.hpp"

namespace secpol {

class World;

enum class ComplianceId { C1, C2, C3, C4 };
inline constexpr int kComplianceRuleCount = 4;
const char* to_string(ComplianceId c);

struct ComplianceRule {
    ComplianceId id;
    std::string description;
    /// Pure: true when the rule is violated.
    std::function<bool(const SecurityConfig&, const World&)> violated;
};

/// C1 no Allow from 0.0.0.0/0 covering port 22
/// C2 flow logging enabled in every zone
/// C3 no database port reachable from outside the VPC
/// C4 every web instance at monitoring level >= 1
const std::vector<ComplianceRule>& default_compliance_rules();

std::set<ComplianceId> evaluate_compliance(const SecurityConfig& config, const World& world,
                                           std::span<const ComplianceRule> rules);

// Direct predicates over the policy state, shared by the default rules and the
// feature/candidate code.
bool is_c1_violating_rule(const FirewallRule& r);
bool c1_violated(const PolicyState& s);
bool c2_violated(const PolicyState& s);
bool c3_violated(const PolicyState& s);
bool c4_violated(const PolicyState& s);
std::set<ComplianceId> default_violations(const PolicyState& s);

}  // namespace secpol
