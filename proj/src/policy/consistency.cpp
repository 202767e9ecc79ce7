#include "secpol/policy/consistency.hpp"

#include <algorithm>
#include <set>

namespace secpol {

std::vector<Conflict> check_consistency(std::span<const FirewallRule> rules) {
    std::vector<Conflict> out;
    std::set<std::pair<int, int>> exact;
    for (const auto& a : rules) {
        if (a.verb != Verb::Allow) continue;
        for (const auto& d : rules) {
            if (d.verb == Verb::Deny && a.same_match(d)) {
                out.push_back({ConflictKind::ExactConflict, a.id, d.id});
                exact.insert({a.id, d.id});
            }
        }
    }
    for (const auto& r : rules) {
        int cover = -1;  // lowest covering id, so the report is order-free
        for (const auto& d : rules) {
            if (d.id == r.id || d.verb != Verb::Deny || d.direction != r.direction) continue;
            if (r.verb == Verb::Deny && d.id > r.id) continue;
            if (!d.source.contains(r.source) || !d.ports.contains(r.ports)) continue;
            if (exact.count({r.id, d.id})) continue;
            if (cover < 0 || d.id < cover) cover = d.id;
        }
        if (cover >= 0) out.push_back({ConflictKind::Shadowed, r.id, cover});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Conflict> check_consistency(const SecurityConfig& config) {
    return check_consistency(config.state.rules);
}

}  // namespace secpol
