#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "secpol/policy/guardrails.hpp"
#include "secpol/world/compliance.hpp"
#include "secpol/world/sampler.hpp"
#include "secpol/world/trace.hpp"
#include "secpol/world/world.hpp"

namespace secpol {
namespace {

const TopologyConfig kTopo = TopologyConfig::default_topology();

ScenarioScript port_scan(int onset, const std::string& src = "45.33.12.7") {
    return make_default_script(ScenarioKind::PortScan, "scan", onset, {{src}, "web-0"});
}

int count_sig(const StepOutput& out, Signature sig) {
    int n = 0;
    for (const auto& e : out.events) {
        if (e.kind == EventKind::NetFlow && observe(e).signature() == sig) ++n;
    }
    return n;
}

TEST(WorldInit, DefaultTopology) {
    const auto w = World::init(kTopo, 1);
    ASSERT_EQ(w.instances().size(), 3u);
    int web = 0;
    for (const auto& i : w.instances()) {
        if (i.tier == Tier::Web) {
            ++web;
            EXPECT_EQ(i.zone, Zone::Public);
        } else {
            EXPECT_EQ(i.zone, Zone::Private);
        }
    }
    EXPECT_EQ(web, 2);
    EXPECT_EQ(w.principals().size(), 3u);
    EXPECT_EQ(w.current_step(), 0);
    const auto c = baseline_config(kTopo);
    for (const auto& i : w.instances()) EXPECT_TRUE(c.state.instances.count(i.id));
    for (const auto& p : w.principals()) EXPECT_TRUE(c.state.principals.count(p.id));
}

TEST(WorldInit, EmptyTopologyIsValid) {
    const auto w = World::init(TopologyConfig::build(0, 0, Zone::Private, 0, 0, 0, 0), 3);
    EXPECT_TRUE(w.instances().empty());
    EXPECT_TRUE(w.principals().empty());
}

TEST(WorldInit, Deterministic) { EXPECT_EQ(World::init(kTopo, 42), World::init(kTopo, 42)); }

TEST(WorldInit, PublicDatabaseRejectedWithRule) {
    try {
        World::init(TopologyConfig::build(1, 1, Zone::Public, 1, 0, 0, 0), 1);
        FAIL();
    } catch (const TopologyError& e) {
        EXPECT_EQ(e.rule(), "T1");
    }
}

TEST(Spawn, PendingUntilOnset) {
    auto w = World::init(kTopo, 1);
    auto c = baseline_config(kTopo);
    w.spawn_scenario(port_scan(10));
    EXPECT_EQ(w.scenario_status("scan"), ScenarioStatus::Pending);
    for (int i = 0; i < 9; ++i) w.step(c);
    EXPECT_EQ(w.scenario_status("scan"), ScenarioStatus::Pending);
    w.step(c);
    EXPECT_EQ(w.current_step(), 10);
    EXPECT_EQ(w.scenario_status("scan"), ScenarioStatus::Active);
}

TEST(Spawn, DuplicateIdRejected) {
    auto w = World::init(kTopo, 1);
    w.spawn_scenario(port_scan(10));
    EXPECT_THROW(w.spawn_scenario(port_scan(12)), WorldError);
}

TEST(Spawn, PastOnsetRejected) {
    auto w = World::init(kTopo, 1);
    auto c = baseline_config(kTopo);
    for (int i = 0; i < 5; ++i) w.step(c);
    EXPECT_THROW(w.spawn_scenario(port_scan(3)), WorldError);
}

TEST(Spawn, UnknownIdThrows) {
    const auto w = World::init(kTopo, 1);
    EXPECT_ANY_THROW(w.scenario_status("nope"));
}

TEST(WorldStep, PortScanEmitsFiveRisingScanFlows) {
    auto w = World::init(kTopo, 5);
    auto c = baseline_config(kTopo);
    w.spawn_scenario(port_scan(1));
    double prev_mean = 0.0;
    for (int t = 0; t < 6; ++t) {
        const auto out = w.step(c);
        EXPECT_EQ(count_sig(out, Signature::Scan), 5);
        double sum = 0.0;
        for (const auto& e : out.events) {
            if (e.kind != EventKind::NetFlow || observe(e).signature() != Signature::Scan) continue;
            EXPECT_EQ(e.source, "45.33.12.7");
            EXPECT_TRUE(e.truth_malicious);
            // Oracle: ramp 0.72 + 0.01 t with noise of at most 0.05.
            EXPECT_NEAR(e.anomaly, 0.72 + 0.01 * t, 0.05 + 1e-12);
            sum += e.anomaly;
        }
        if (t > 0) EXPECT_GT(sum / 5 + 0.05, prev_mean - 0.05);
        prev_mean = sum / 5;
    }
}

TEST(WorldStep, DeniedSourceSuppressesAndNeutralizes) {
    auto w = World::init(kTopo, 5);
    auto c = baseline_config(kTopo);
    w.spawn_scenario(port_scan(2));
    w.step(c);
    apply_action(c, action::BlockSource{*Cidr::parse("45.33.12.7")}, {});
    const auto out = w.step(c);
    EXPECT_EQ(count_sig(out, Signature::Scan), 0);
    EXPECT_EQ(w.scenario_status("scan"), ScenarioStatus::Neutralized);
    ASSERT_EQ(out.incidents.size(), 1u);
    EXPECT_EQ(out.incidents[0].outcome, ScenarioStatus::Neutralized);
    for (int i = 0; i < 100; ++i) w.step(c);
    EXPECT_EQ(w.scenario_status("scan"), ScenarioStatus::Neutralized);
    EXPECT_EQ(w.incident_log().size(), 1u);
}

TEST(WorldStep, CredCompromiseBreachesOnce) {
    auto w = World::init(kTopo, 5);
    auto c = baseline_config(kTopo);
    ScenarioTargets t;
    t.principal = "admin-1";
    t.logging_zone = Zone::Private;
    w.spawn_scenario(make_default_script(ScenarioKind::CredCompromise, "cred", 3, t));
    int breaches = 0;
    int breach_step = -1;
    for (int i = 0; i < 60; ++i) {
        for (const auto& inc : w.step(c).incidents) {
            if (inc.outcome == ScenarioStatus::Breached) {
                ++breaches;
                breach_step = inc.step;
            }
        }
    }
    EXPECT_EQ(breaches, 1);
    EXPECT_EQ(breach_step, 3 + 20);
    EXPECT_EQ(w.scenario_status("cred"), ScenarioStatus::Breached);
    // The cover stage switched logging off through drift.
    EXPECT_FALSE(c.state.flow_logging.at(Zone::Private));
    const auto* p = &w.principals()[1];
    EXPECT_EQ(p->id, "admin-1");
    EXPECT_TRUE(p->compromised);
}

TEST(WorldStep, RestrictedPrincipalNeutralizes) {
    auto w = World::init(kTopo, 5);
    auto c = baseline_config(kTopo);
    ScenarioTargets t;
    t.principal = "admin-1";
    w.spawn_scenario(make_default_script(ScenarioKind::CredCompromise, "cred", 1, t));
    w.step(c);
    apply_action(c, action::RestrictPrincipal{"admin-1"}, {});
    w.step(c);
    EXPECT_EQ(w.scenario_status("cred"), ScenarioStatus::Neutralized);
}

TEST(WorldStep, BenignBurstExpiresAfterWindow) {
    auto w = World::init(kTopo, 5);
    auto c = baseline_config(kTopo);
    ScenarioTargets t;
    t.principal = "admin-0";
    w.spawn_scenario(make_default_script(ScenarioKind::BenignAdminBurst, "burst", 1, t));
    int expired_at = -1;
    for (int i = 0; i < 60; ++i) {
        const auto out = w.step(c);
        for (const auto& e : out.events) {
            if (e.source == "admin-0" && e.attrs.count("api_name") && e.attrs.at("api_name") == "RunInstances") {
                EXPECT_FALSE(e.truth_malicious);
                EXPECT_NEAR(e.anomaly, 0.6, 0.05 + 1e-12);
            }
        }
        for (const auto& inc : out.incidents) {
            if (inc.outcome == ScenarioStatus::Expired) expired_at = inc.step;
        }
    }
    EXPECT_EQ(expired_at, 41);
    EXPECT_EQ(w.scenario_status("burst"), ScenarioStatus::Expired);
}

TEST(WorldStep, ConfigDriftInsertsC1Rule) {
    auto w = World::init(kTopo, 5);
    auto c = baseline_config(kTopo);
    w.spawn_scenario(make_default_script(ScenarioKind::ConfigDrift, "drift", 2, {}));
    w.step(c);
    EXPECT_TRUE(default_violations(c.state).empty());
    w.step(c);
    EXPECT_EQ(default_violations(c.state), std::set<ComplianceId>{ComplianceId::C1});
    EXPECT_EQ(c.change_log.back().actor, Actor::Drift);
    const int id = w.find_scenario("drift")->drift_rule_id;
    apply_action(c, action::RevokeRule{id}, {});
    w.step(c);
    EXPECT_EQ(w.scenario_status("drift"), ScenarioStatus::Neutralized);
}

TEST(WorldStep, IsolatedTargetEmitsNothing) {
    auto w = World::init(kTopo, 5);
    auto c = baseline_config(kTopo);
    ScenarioTargets t{{"91.4.4.4"}, "web-1"};
    w.spawn_scenario(make_default_script(ScenarioKind::WebExploit, "web", 1, t));
    apply_action(c, action::IsolateInstance{"web-1"}, {});
    for (int i = 0; i < 5; ++i) {
        for (const auto& e : w.step(c).events) {
            EXPECT_NE(observe(e).attr("dst"), "web-1");
        }
    }
}

// Property: scenarios whose source is denied from onset never breach; and
// outcomes are absorbing with at most one incident per scenario.
TEST(WorldProperty, BlockingSoundnessAndAbsorbingOutcomes) {
    Rng rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        auto w = World::init(kTopo, static_cast<std::uint64_t>(trial));
        auto c = baseline_config(kTopo);
        const std::string src = "91.7." + std::to_string(trial) + ".9";
        apply_action(c, action::BlockSource{*Cidr::parse(src)}, {});
        w.spawn_scenario(make_default_script(ScenarioKind::WebExploit, "blocked", 5, {{src}, "web-0"}));
        Rng local(static_cast<std::uint64_t>(trial) + 1000);
        auto others = sample_scenarios(full_mix(), kTopo, 200, local);
        for (auto& s : others) w.spawn_scenario(s);
        std::map<std::string, ScenarioStatus> concluded;
        for (int t = 0; t < 200; ++t) {
            // Random agent-ish interventions.
            if (rng.uniform() < 0.05) apply_action(c, action::RaiseMonitoring{"web-1"}, {});
            if (rng.uniform() < 0.02) apply_action(c, action::IsolateInstance{"web-1"}, {});
            w.step(c);
            for (const auto& sc : w.scenarios()) {
                if (concluded.count(sc.script.id)) {
                    ASSERT_EQ(sc.status, concluded[sc.script.id]);
                } else if (is_concluded(sc.status)) {
                    concluded[sc.script.id] = sc.status;
                }
            }
        }
        EXPECT_NE(w.scenario_status("blocked"), ScenarioStatus::Breached);
        std::map<std::string, int> per_id;
        for (const auto& inc : w.incident_log()) ++per_id[inc.scenario_id];
        for (const auto& [id, n] : per_id) EXPECT_LE(n, 1) << id;
        EXPECT_EQ(per_id.size(), concluded.size());
    }
}

TEST(WorldProperty, Deterministic) {
    auto run = [] {
        auto w = World::init(kTopo, 17);
        auto c = baseline_config(kTopo);
        Rng rng(5);
        for (auto& s : sample_scenarios(full_mix(), kTopo, 300, rng)) w.spawn_scenario(s);
        std::vector<SecurityEvent> all;
        for (int t = 0; t < 300; ++t) {
            auto out = w.step(c);
            all.insert(all.end(), out.events.begin(), out.events.end());
        }
        return std::make_pair(all, w.incident_log());
    };
    EXPECT_EQ(run(), run());
}

TEST(Compliance, BaselineClean) {
    const auto w = World::init(kTopo, 1);
    const auto c = baseline_config(kTopo);
    EXPECT_TRUE(evaluate_compliance(c, w, default_compliance_rules()).empty());
}

TEST(Compliance, OpenSshIsC1) {
    const auto w = World::init(kTopo, 1);
    auto c = baseline_config(kTopo);
    FirewallRule r{0, Direction::Ingress, Cidr::any(), PortRange::single(22), Verb::Allow, RuleOrigin::Drift};
    apply_action(c, action::InsertRule{r}, {}, 0, Actor::Drift);
    EXPECT_EQ(evaluate_compliance(c, w, default_compliance_rules()), std::set<ComplianceId>{ComplianceId::C1});
}

TEST(Compliance, LoggingOffIsC2) {
    const auto w = World::init(kTopo, 1);
    auto c = baseline_config(kTopo);
    apply_action(c, action::DisableFlowLogging{Zone::Public}, {}, 0, Actor::Drift);
    EXPECT_EQ(evaluate_compliance(c, w, default_compliance_rules()), std::set<ComplianceId>{ComplianceId::C2});
}

// Hand-written oracle for the four rules over random configurations.
std::set<ComplianceId> oracle(const PolicyState& s) {
    std::set<ComplianceId> v;
    const auto world = *parse_ipv4("8.8.8.8");
    for (const auto& r : s.rules) {
        if (r.direction == Direction::Ingress && r.verb == Verb::Allow && r.source.prefix() == 0 &&
            r.ports.contains(22)) {
            v.insert(ComplianceId::C1);
        }
    }
    for (const auto& [z, on] : s.flow_logging) {
        if (!on) v.insert(ComplianceId::C2);
    }
    // C3 by sampling outside addresses: allowed and not denied on 3306.
    for (std::uint32_t a : {world, *parse_ipv4("45.1.1.1"), *parse_ipv4("203.0.113.5"), *parse_ipv4("11.0.0.1")}) {
        bool allowed = false;
        for (const auto& r : s.rules) {
            if (r.direction == Direction::Ingress && r.verb == Verb::Allow && r.source.contains(a) &&
                r.ports.contains(kDbPort)) {
                allowed = true;
            }
        }
        if (allowed && !s.ingress_denied(a, kDbPort)) v.insert(ComplianceId::C3);
    }
    for (const auto& [id, i] : s.instances) {
        if (i.tier == Tier::Web && i.monitoring < 1) v.insert(ComplianceId::C4);
    }
    return v;
}

TEST(Compliance, MatchesOracleOnRandomConfigs) {
    Rng rng(8);
    const auto w = World::init(kTopo, 1);
    const std::vector<Cidr> sources{Cidr::any(), *Cidr::parse("0.0.0.0/1"), *Cidr::parse("8.8.8.0/24"),
                                    kVpcCidr, *Cidr::parse("45.1.1.1")};
    const std::vector<PortRange> ports{PortRange::single(22), PortRange::single(3306), {0, 1024},
                                       PortRange::all(), {3000, 4000}};
    for (int trial = 0; trial < 500; ++trial) {
        auto c = baseline_config(kTopo);
        const int n = static_cast<int>(rng.uniform_int(0, 4));
        for (int k = 0; k < n; ++k) {
            FirewallRule r{0, Direction::Ingress, sources[static_cast<std::size_t>(rng.uniform_int(0, 4))],
                           ports[static_cast<std::size_t>(rng.uniform_int(0, 4))],
                           rng.uniform() < 0.5 ? Verb::Allow : Verb::Deny, RuleOrigin::Drift};
            apply_action(c, action::InsertRule{r}, {}, 0, Actor::Drift);
        }
        if (rng.uniform() < 0.3) c.state.flow_logging[Zone::Public] = false;
        if (rng.uniform() < 0.3) c.state.instances["web-1"].monitoring = 0;
        const auto got = evaluate_compliance(c, w, default_compliance_rules());
        const auto expect = oracle(c.state);
        // C1, C2 and C4 must agree exactly; C3 sampling can only under-report.
        for (auto id : {ComplianceId::C1, ComplianceId::C2, ComplianceId::C4}) {
            ASSERT_EQ(got.count(id), expect.count(id)) << to_string(id) << " trial " << trial;
        }
        if (expect.count(ComplianceId::C3)) ASSERT_TRUE(got.count(ComplianceId::C3)) << trial;
        ASSERT_EQ(got, evaluate_compliance(c, w, default_compliance_rules()));
    }
}

TEST(Trace, ThreeRowsLandOnTheirSteps) {
    std::istringstream in(
        "step,kind,source,attrs,anomaly\n"
        "1,NetFlow,45.1.2.3,dst_port=22;signature=scan,0.8\n"
        "1,ApiCall,admin-0,api_name=ListBuckets,0.1\n"
        "2,NetFlow,45.1.2.4,dst_port=80,0.3\n");
    auto events = parse_trace(in);
    ASSERT_EQ(events.size(), 3u);
    auto w = World::init(kTopo, 1);
    auto c = baseline_config(kTopo);
    w.inject_trace(events);
    auto replayed = [](const StepOutput& o) {
        std::vector<SecurityEvent> r;
        for (const auto& e : o.events) {
            if (e.origin == EventOrigin::Replay) r.push_back(e);
        }
        return r;
    };
    const auto s1 = replayed(w.step(c));
    ASSERT_EQ(s1.size(), 2u);
    EXPECT_EQ(s1[0].source, "45.1.2.3");
    EXPECT_EQ(s1[1].source, "admin-0");
    EXPECT_FALSE(s1[0].truth_malicious);
    const auto s2 = replayed(w.step(c));
    ASSERT_EQ(s2.size(), 1u);
    EXPECT_EQ(s2[0].attrs.at("dst_port"), "80");
    EXPECT_TRUE(replayed(w.step(c)).empty());
}

TEST(Trace, EmptyTraceChangesNothing) {
    std::istringstream empty("");
    EXPECT_TRUE(parse_trace(empty).empty());
    auto a = World::init(kTopo, 1);
    auto b = World::init(kTopo, 1);
    b.inject_trace({});
    EXPECT_EQ(a, b);
}

TEST(Trace, PastStepRejected) {
    auto w = World::init(kTopo, 1);
    auto c = baseline_config(kTopo);
    for (int i = 0; i < 3; ++i) w.step(c);
    SecurityEvent e;
    e.step = 2;
    EXPECT_THROW(w.inject_trace({e}), WorldError);
}

TEST(Trace, MalformedRowNamesLine) {
    std::istringstream in(
        "step,kind,source,attrs,anomaly\n"
        "1,NetFlow,45.1.2.3,dst_port=22,0.8\n"
        "2,Bogus,45.1.2.3,,0.8\n");
    try {
        parse_trace(in);
        FAIL();
    } catch (const TraceError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(Trace, DecreasingStepsRejected) {
    std::istringstream in("step,kind,source,attrs,anomaly\n5,NetFlow,a,,0.1\n4,NetFlow,b,,0.1\n");
    EXPECT_THROW(parse_trace(in), TraceError);
}

TEST(Trace, TruthColumnOnlyInFixtures) {
    const std::string text = "step,kind,source,attrs,anomaly,truth\n1,NetFlow,a,,0.1,1\n";
    std::istringstream strict(text);
    EXPECT_THROW(parse_trace(strict), TraceError);
    std::istringstream fixture(text);
    const auto ev = parse_trace(fixture, true);
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_TRUE(ev[0].truth_malicious);
}

TEST(Sampler, SingleAttackMixDrawsOneAttack) {
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const auto s = sample_scenarios(single_attack_mix(), kTopo, 720, rng);
        ASSERT_EQ(s.size(), 1u);
        EXPECT_TRUE(is_attack(s[0].kind));
    }
}

TEST(Sampler, FullMixAlwaysHasDriftAndBurst) {
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        const auto s = sample_scenarios(full_mix(), kTopo, 720, rng);
        ASSERT_GE(s.size(), 3u);
        ASSERT_LE(s.size(), 4u);
        bool drift = false, burst = false;
        for (const auto& sc : s) {
            drift |= sc.kind == ScenarioKind::ConfigDrift;
            burst |= sc.kind == ScenarioKind::BenignAdminBurst;
            EXPECT_NO_THROW(sc.validate());
            EXPECT_GE(sc.onset, 1);
        }
        EXPECT_TRUE(drift && burst);
    }
}

TEST(Sampler, BlockableFractionNearConfigured) {
    Rng rng(3);
    auto mix = single_attack_mix();
    int blockable = 0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) blockable += sample_scenarios(mix, kTopo, 720, rng)[0].baseline_blockable;
    // Binomial(4000, 0.7): sd ~ 0.0072.
    EXPECT_NEAR(static_cast<double>(blockable) / n, 0.70, 0.03);
}

TEST(Sampler, BlockableNetworkAttacksAreDeniedByBaseline) {
    Rng rng(4);
    const auto c = baseline_config(kTopo);
    for (int i = 0; i < 300; ++i) {
        for (const auto& s : sample_scenarios(single_attack_mix(), kTopo, 720, rng)) {
            if (s.kind == ScenarioKind::CredCompromise) {
                EXPECT_EQ(c.state.principals.at(s.principal).restricted, s.baseline_blockable);
                continue;
            }
            for (const auto& src : s.sources) {
                EXPECT_EQ(c.state.ingress_denied(*parse_ipv4(src), 443), s.baseline_blockable) << src;
            }
        }
    }
}

TEST(Scenario, ValidateRejectsBadStages) {
    auto s = port_scan(5);
    s.stages[1].offset = 0;
    EXPECT_THROW(s.validate(), ScenarioError);
    s = port_scan(5);
    s.breach_deadline = 5;
    EXPECT_THROW(s.validate(), ScenarioError);
}

}  // namespace
}  // namespace secpol
