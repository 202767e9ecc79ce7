#pragma once

#include <span>
#include <vector>

#include "secpol/policy/config.hpp"

namespace secpol {

enum class ConflictKind { ExactConflict, Shadowed };

struct Conflict {
    ConflictKind kind;
    int rule;      // ExactConflict: the Allow rule; Shadowed: the dead rule
    int other;     // ExactConflict: the Deny rule; Shadowed: the covering Deny
    bool operator==(const Conflict&) const = default;
    auto operator<=>(const Conflict&) const = default;
};

/// Reports Allow/Deny pairs on an identical (source, ports, direction) tuple and
/// rules whose whole match set is covered by a Deny (any Deny for an Allow,
/// an earlier Deny for a Deny). Exact-conflict pairs are not repeated as
/// shadowing. Output is sorted and does not depend on rule order.
std::vector<Conflict> check_consistency(std::span<const FirewallRule> rules);
std::vector<Conflict> check_consistency(const SecurityConfig& config);

}  // namespace secpol
