#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "secpol/common/rng.hpp"
#include "secpol/policy/cidr.hpp"
#include "secpol/policy/config.hpp"
#include "secpol/policy/consistency.hpp"
#include "secpol/policy/guardrails.hpp"
#include "secpol/world/topology.hpp"

namespace secpol {
namespace {

SecurityConfig baseline() { return baseline_config(TopologyConfig::default_topology()); }

Cidr cidr(const char* s) { return *Cidr::parse(s); }

FirewallRule rule(int id, const char* src, int lo, int hi, Verb v) {
    return {id, Direction::Ingress, cidr(src), {lo, hi}, v, RuleOrigin::Baseline};
}

TEST(Cidr, ParseAndFormat) {
    EXPECT_EQ(cidr("10.1.2.3/8").str(), "10.0.0.0/8");
    EXPECT_EQ(cidr("198.51.100.7").prefix(), 32);
    EXPECT_FALSE(Cidr::parse("10.0.0.0/33"));
    EXPECT_FALSE(Cidr::parse("256.0.0.1"));
    EXPECT_FALSE(Cidr::parse("1.2.3"));
    EXPECT_FALSE(Cidr::parse(""));
    EXPECT_EQ(format_ipv4(*parse_ipv4("203.0.113.9")), "203.0.113.9");
}

TEST(Cidr, ContainmentAgainstEnumeration) {
    // Brute force over a /20 neighbourhood.
    const Cidr outer = cidr("10.0.0.0/22");
    const Cidr inner = cidr("10.0.2.0/23");
    const std::uint32_t base = *parse_ipv4("10.0.0.0");
    bool all_inside = true;
    for (std::uint32_t a = inner.base(); a <= inner.last(); ++a) all_inside &= outer.contains(a);
    EXPECT_TRUE(all_inside);
    EXPECT_TRUE(outer.contains(inner));
    EXPECT_FALSE(inner.contains(outer));
    for (std::uint32_t a = base; a < base + 4096; ++a) {
        const bool oracle = a >= outer.base() && a <= outer.last();
        ASSERT_EQ(outer.contains(a), oracle) << format_ipv4(a);
    }
}

TEST(Cidr, CoveredByUnion) {
    const std::vector<Cidr> halves{cidr("10.0.0.0/9"), cidr("10.128.0.0/9")};
    EXPECT_TRUE(covered_by_union(cidr("10.0.0.0/8"), halves));
    EXPECT_FALSE(covered_by_union(cidr("10.0.0.0/8"), std::vector<Cidr>{halves[0]}));
    EXPECT_TRUE(covered_by_union(cidr("1.2.3.4"), std::vector<Cidr>{Cidr::any()}));
}

TEST(ApplyAction, BlockSourceAddsDeny) {
    auto c = baseline();
    const auto rules = c.state.rules.size();
    auto r = apply_action(c, action::BlockSource{cidr("198.51.100.7")}, {});
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(c.version, 1);
    ASSERT_EQ(c.state.rules.size(), rules + 1);
    const auto& added = c.state.rules.back();
    EXPECT_EQ(added.verb, Verb::Deny);
    EXPECT_EQ(added.origin, RuleOrigin::Agent);
    EXPECT_EQ(added.source, cidr("198.51.100.7"));
    EXPECT_TRUE(c.state.ingress_denied(*parse_ipv4("198.51.100.7"), 22));
    ASSERT_TRUE(r.change);
    EXPECT_EQ(r.change->post_version, r.change->pre_version + 1);
}

TEST(ApplyAction, IsolatingLastWebInstanceHitsG4) {
    auto c = baseline();
    ASSERT_TRUE(apply_action(c, action::IsolateInstance{"web-0"}, {}).ok());
    const auto before = c.state;
    const int version = c.version;
    auto r = apply_action(c, action::IsolateInstance{"web-1"}, {});
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.violation->id, GuardrailId::G4);
    EXPECT_EQ(c.state, before);
    EXPECT_EQ(c.version, version);
}

TEST(ApplyAction, NoOpIsIdentity) {
    auto c = baseline();
    auto r = apply_action(c, action::NoOp{}, {});
    EXPECT_TRUE(r.ok());
    EXPECT_FALSE(r.change);
    EXPECT_EQ(c.version, 0);
    EXPECT_TRUE(c.change_log.empty());
}

TEST(ApplyAction, UnknownTargetThrows) {
    auto c = baseline();
    try {
        apply_action(c, action::RestrictPrincipal{"nobody"}, {});
        FAIL();
    } catch (const PolicyError& e) {
        EXPECT_EQ(e.kind(), PolicyError::Kind::TargetNotFound);
    }
    EXPECT_THROW(apply_action(c, action::OpenPort{999}, {}), PolicyError);
}

TEST(Guardrails, RestrictAdmins) {
    auto c = baseline();
    EXPECT_FALSE(check_guardrails(c, action::RestrictPrincipal{"admin-0"}));
    ASSERT_TRUE(apply_action(c, action::RestrictPrincipal{"admin-0"}, {}).ok());
    auto v = check_guardrails(c, action::RestrictPrincipal{"admin-1"});
    ASSERT_TRUE(v);
    EXPECT_EQ(v->id, GuardrailId::G3);
}

TEST(Guardrails, LastLoggedZone) {
    auto c = baseline();
    EXPECT_FALSE(check_guardrails(c, action::DisableFlowLogging{Zone::Public}));
    apply_action(c, action::DisableFlowLogging{Zone::Public}, {}, 0, Actor::Drift);
    auto v = check_guardrails(c, action::DisableFlowLogging{Zone::Private});
    ASSERT_TRUE(v);
    EXPECT_EQ(v->id, GuardrailId::G2);
}

TEST(Guardrails, DisabledSetAllowsEverything) {
    auto c = baseline();
    apply_action(c, action::IsolateInstance{"web-0"}, {});
    EXPECT_FALSE(check_guardrails(c, action::IsolateInstance{"web-1"}, GuardrailSet{false}));
}

TEST(Guardrails, BlockingAllWebTrafficHitsG1) {
    auto c = baseline();
    auto v = check_guardrails(c, action::BlockSource{Cidr::any()});
    ASSERT_TRUE(v);
    EXPECT_EQ(v->id, GuardrailId::G1);
}

TEST(Guardrails, DriftBypasses) {
    auto c = baseline();
    apply_action(c, action::DisableFlowLogging{Zone::Public}, {}, 0, Actor::Drift);
    auto r = apply_action(c, action::DisableFlowLogging{Zone::Private}, {}, 0, Actor::Drift);
    EXPECT_TRUE(r.ok());
    EXPECT_FALSE(c.state.flow_logging.at(Zone::Private));
}

// Random sequences of every agent-reachable action never break the floor.
TEST(Guardrails, PropertyRandomSequencesKeepFloor) {
    Rng rng(2024);
    const auto topo = TopologyConfig::build(2, 2, Zone::Private, 2, 1, 1, 1);
    for (int trial = 0; trial < 300; ++trial) {
        auto c = baseline_config(topo);
        for (int k = 0; k < 30; ++k) {
            std::vector<ConcreteAction> pool{action::BlockSource{Cidr::any()},
                                             action::BlockSource{cidr("0.0.0.0/1")},
                                             action::BlockSource{cidr("128.0.0.0/1")},
                                             action::EnableFlowLogging{Zone::Public}};
            for (const auto& [id, p] : c.state.principals) pool.push_back(action::RestrictPrincipal{id});
            for (const auto& [id, i] : c.state.instances) {
                pool.push_back(action::IsolateInstance{id});
                pool.push_back(action::RaiseMonitoring{id});
            }
            for (const auto& r : c.state.rules) {
                if (r.origin == RuleOrigin::Agent) pool.push_back(action::OpenPort{r.id});
                if (r.verb == Verb::Allow) pool.push_back(action::RevokeRule{r.id});
            }
            pool.push_back(action::Rollback{static_cast<int>(rng.uniform_int(0, c.version))});
            const auto& a = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<long>(pool.size()) - 1))];
            apply_action(c, a, {}, k);
            ASSERT_FALSE(c.state.rules.empty());
            for (auto g : {GuardrailId::G1, GuardrailId::G2, GuardrailId::G3, GuardrailId::G4}) {
                ASSERT_TRUE(guardrail_holds(g, c.state)) << to_string(g) << " after " << describe(a);
            }
        }
    }
}

TEST(Consistency, ExactConflict) {
    std::vector<FirewallRule> rules{rule(1, "1.2.3.0/24", 80, 80, Verb::Allow),
                                    rule(2, "1.2.3.0/24", 80, 80, Verb::Deny)};
    const auto c = check_consistency(rules);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0], (Conflict{ConflictKind::ExactConflict, 1, 2}));
}

TEST(Consistency, DenyShadowsNarrowerAllow) {
    std::vector<FirewallRule> rules{rule(1, "0.0.0.0/0", 22, 22, Verb::Deny),
                                    rule(2, "10.0.0.0/8", 22, 22, Verb::Allow)};
    // Oracle: sample addresses across the /8 are all denied by rule 1.
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const auto a = 0x0a000000u + static_cast<std::uint32_t>(rng.uniform_int(0, 0xffffff));
        ASSERT_TRUE(rules[0].source.contains(a));
    }
    const auto c = check_consistency(rules);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].kind, ConflictKind::Shadowed);
    EXPECT_EQ(c[0].rule, 2);
    EXPECT_EQ(c[0].other, 1);
}

TEST(Consistency, BaselineIsClean) { EXPECT_TRUE(check_consistency(baseline()).empty()); }

TEST(Consistency, OrderInsensitive) {
    std::vector<FirewallRule> rules{rule(1, "1.2.3.0/24", 80, 80, Verb::Allow),
                                    rule(2, "1.2.3.0/24", 80, 80, Verb::Deny),
                                    rule(3, "5.0.0.0/8", 0, 65535, Verb::Deny),
                                    rule(4, "5.6.0.0/16", 443, 443, Verb::Allow),
                                    rule(5, "9.9.9.9", 22, 22, Verb::Allow),
                                    rule(6, "9.9.9.9", 22, 22, Verb::Deny)};
    const auto expected = check_consistency(rules);
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        rng.shuffle(rules);
        EXPECT_EQ(check_consistency(rules), expected);
    }
}

TEST(Rollback, ToCurrentRecordsNoOpChange) {
    auto c = baseline();
    apply_action(c, action::BlockSource{cidr("1.2.3.4")}, {});
    const auto state = c.state;
    rollback(c, c.version);
    EXPECT_EQ(c.state, state);
    EXPECT_EQ(c.version, 2);
    EXPECT_EQ(c.change_log.size(), 2u);
}

TEST(Rollback, ToOriginRestoresState) {
    auto c = baseline();
    const auto origin = c.state;
    apply_action(c, action::BlockSource{cidr("1.2.3.4")}, {});
    apply_action(c, action::RestrictPrincipal{"admin-0"}, {});
    apply_action(c, action::RaiseMonitoring{"web-0"}, {});
    rollback(c, 0);
    EXPECT_EQ(c.state, origin);
    EXPECT_TRUE(config_diff(c.state, origin).empty());
    EXPECT_EQ(c.version, 4);
}

TEST(Rollback, FutureVersionThrows) {
    auto c = baseline();
    EXPECT_THROW(rollback(c, 1), PolicyError);
    EXPECT_THROW(rollback(c, -1), PolicyError);
}

TEST(Versioning, ReplayReconstructsEveryVersion) {
    auto c = baseline();
    std::vector<PolicyState> history{c.state};
    apply_action(c, action::BlockSource{cidr("1.2.3.4")}, {});
    history.push_back(c.state);
    apply_action(c, action::RaiseMonitoring{"web-1"}, {});
    history.push_back(c.state);
    apply_action(c, action::InsertRule{rule(0, "0.0.0.0/0", 22, 22, Verb::Allow)}, {}, 0, Actor::Drift);
    history.push_back(c.state);
    rollback(c, 1);
    history.push_back(c.state);
    ASSERT_EQ(c.change_log.size(), static_cast<std::size_t>(c.version - c.initial_version));
    for (int v = 0; v <= c.version; ++v) EXPECT_EQ(state_at(c, v), history[static_cast<std::size_t>(v)]) << v;
    for (std::size_t i = 0; i < c.change_log.size(); ++i) {
        EXPECT_EQ(c.change_log[i].pre_version, static_cast<int>(i));
        EXPECT_EQ(c.change_log[i].post_version, static_cast<int>(i) + 1);
    }
}

TEST(Diff, SelfIsEmpty) {
    const auto c = baseline();
    EXPECT_TRUE(config_diff(c, c).empty());
}

TEST(Diff, AddedDenyIsOneEntryAndInverts) {
    const auto a = baseline();
    auto b = a;
    apply_action(b, action::BlockSource{cidr("1.2.3.4")}, {});
    const auto d = config_diff(a, b);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].kind, DiffKind::Added);
    const auto back = config_diff(b, a);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].kind, DiffKind::Removed);
    EXPECT_EQ(back[0].path, d[0].path);
    EXPECT_EQ(back[0].before, d[0].after);
}

TEST(Diff, ModifiedFieldsInvert) {
    const auto a = baseline();
    auto b = a;
    apply_action(b, action::RaiseMonitoring{"web-0"}, {});
    apply_action(b, action::RestrictPrincipal{"admin-1"}, {});
    const auto ab = config_diff(a, b);
    const auto ba = config_diff(b, a);
    ASSERT_EQ(ab.size(), ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
        EXPECT_EQ(ab[i].kind, DiffKind::Modified);
        EXPECT_EQ(ab[i].path, ba[i].path);
        EXPECT_EQ(ab[i].before, ba[i].after);
        EXPECT_EQ(ab[i].after, ba[i].before);
    }
}

TEST(Canonical, StableAcrossRuleOrder) {
    auto a = baseline();
    auto b = a;
    std::reverse(b.state.rules.begin(), b.state.rules.end());
    EXPECT_EQ(to_canonical_text(a), to_canonical_text(b));
    apply_action(b, action::BlockSource{cidr("1.2.3.4")}, {});
    EXPECT_NE(to_canonical_text(a), to_canonical_text(b));
}

}  // namespace
}  // namespace secpol
