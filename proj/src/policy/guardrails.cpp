#include "secpol/policy/guardrails.hpp"

#include <algorithm>
#include <array>

namespace secpol {

const char* to_string(GuardrailId g) {
    switch (g) {
        case GuardrailId::G1: return "G1";
        case GuardrailId::G2: return "G2";
        case GuardrailId::G3: return "G3";
        case GuardrailId::G4: return "G4";
    }
    return "?";
}

bool web_tier_reachable(const PolicyState& s) {
    for (const int port : {80, 443}) {
        std::vector<Cidr> denies;
        for (const auto& r : s.rules) {
            if (r.direction == Direction::Ingress && r.verb == Verb::Deny && r.ports.contains(port)) {
                denies.push_back(r.source);
            }
        }
        for (const auto& r : s.rules) {
            if (r.direction == Direction::Ingress && r.verb == Verb::Allow && r.ports.contains(port) &&
                !covered_by_union(r.source, denies)) {
                return true;
            }
        }
    }
    return false;
}

bool guardrail_holds(GuardrailId g, const PolicyState& s) {
    switch (g) {
        case GuardrailId::G1: {
            const bool has_web = std::any_of(s.instances.begin(), s.instances.end(),
                                             [](const auto& kv) { return kv.second.tier == Tier::Web; });
            return !s.rules.empty() && (!has_web || web_tier_reachable(s));
        }
        case GuardrailId::G2:
            return s.flow_logging.empty() ||
                   std::any_of(s.flow_logging.begin(), s.flow_logging.end(),
                               [](const auto& kv) { return kv.second; });
        case GuardrailId::G3: {
            bool any_admin = false;
            for (const auto& [id, p] : s.principals) {
                if (p.privilege != Privilege::Admin) continue;
                any_admin = true;
                if (!p.restricted) return true;
            }
            return !any_admin;
        }
        case GuardrailId::G4:
            for (const Tier tier : {Tier::Web, Tier::Db}) {
                int total = 0;
                int isolated = 0;
                for (const auto& [id, inst] : s.instances) {
                    if (inst.tier != tier) continue;
                    ++total;
                    isolated += inst.isolated ? 1 : 0;
                }
                if (total > 0 && isolated == total) return false;
            }
            return true;
    }
    return true;
}

std::optional<GuardrailViolation> check_guardrails(const SecurityConfig& config, const ConcreteAction& a,
                                                   const GuardrailSet& guardrails) {
    if (!guardrails.enabled || std::holds_alternative<action::NoOp>(a)) return std::nullopt;
    const PolicyState post = std::holds_alternative<action::Rollback>(a)
                                 ? state_at(config, std::get<action::Rollback>(a).target_version)
                                 : [&] {
                                       PolicyState s = config.state;
                                       mutate(s, a);
                                       return s;
                                   }();
    static constexpr std::array kAll{GuardrailId::G1, GuardrailId::G2, GuardrailId::G3, GuardrailId::G4};
    for (const auto g : kAll) {
        if (guardrail_holds(g, config.state) && !guardrail_holds(g, post)) {
            return GuardrailViolation{g, std::string(to_string(g)) + " blocks " + describe(a)};
        }
    }
    return std::nullopt;
}

namespace {

PolicyChange record(SecurityConfig& config, const ConcreteAction& a, int step, Actor actor) {
    PolicyChange ch{step, actor, a, config.version, config.version + 1};
    config.version += 1;
    config.change_log.push_back(ch);
    return ch;
}

}  // namespace

ApplyResult apply_action(SecurityConfig& config, const ConcreteAction& a, const GuardrailSet& guardrails,
                         int step, Actor actor) {
    if (std::holds_alternative<action::NoOp>(a)) return {};
    if (std::holds_alternative<action::Rollback>(a)) {
        const auto target = std::get<action::Rollback>(a).target_version;
        if (actor == Actor::Agent) {
            if (auto v = check_guardrails(config, a, guardrails)) return {std::nullopt, std::move(v)};
        }
        return {rollback(config, target, step), std::nullopt};
    }

    ConcreteAction logged = a;
    if (auto* ins = std::get_if<action::InsertRule>(&logged)) {
        // Logged with its assigned id so replays are exact.
        ins->rule.id = config.state.next_rule_id;
    }
    if (actor == Actor::Agent) {
        if (auto v = check_guardrails(config, a, guardrails)) return {std::nullopt, std::move(v)};
        mutate(config.state, a);
    } else {
        mutate(config.state, a);
    }
    return {record(config, logged, step, actor), std::nullopt};
}

PolicyChange rollback(SecurityConfig& config, int target_version, int step) {
    PolicyState restored = state_at(config, target_version);
    config.state = std::move(restored);
    return record(config, action::Rollback{target_version}, step, Actor::Baseline);
}

}  // namespace secpol
