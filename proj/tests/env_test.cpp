#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"
#include "secpol/env/env.hpp"
#include "secpol/env/episode_log.hpp"

namespace secpol {
namespace {

const TopologyConfig kTopo = TopologyConfig::default_topology();

ObservedEvent flow(const std::string& src, double anomaly, Signature sig = Signature::None, int port = 443,
                   const std::string& dst = "web-0") {
    ObservedEvent e;
    e.kind = EventKind::NetFlow;
    e.source = src;
    e.anomaly = anomaly;
    e.attrs = {{"dst", dst}, {"dst_port", std::to_string(port)}};
    if (sig != Signature::None) e.attrs["signature"] = to_string(sig);
    return e;
}

ObservedEvent alert(const std::string& src, double anomaly) {
    auto e = flow(src, anomaly);
    e.kind = EventKind::Alert;
    return e;
}

StateVector features_of(const EventWindow& w, const PolicyState& s, const WorldView& v) {
    return extract_features(w, s, v, rank_candidates(w, s, v), FeatureContext{});
}

struct Fixture {
    World world = World::init(kTopo, 1);
    SecurityConfig config = baseline_config(kTopo);
    EventWindow window{12};
    WorldView view() const { return view_of(world); }
};

TEST(Actions, Bijection) {
    std::set<ActionId> seen;
    for (int t = 0; t < kActionTypeCount; ++t) {
        for (int s = 0; s < kSlotCount; ++s) {
            const auto id = encode_action(static_cast<ActionType>(t), s);
            EXPECT_TRUE(seen.insert(id).second);
            const auto d = decode_action_id(id);
            EXPECT_FALSE(d.noop);
            EXPECT_EQ(static_cast<int>(d.type), t);
            EXPECT_EQ(d.slot, s);
        }
    }
    EXPECT_TRUE(decode_action_id(0).noop);
    EXPECT_EQ(seen.size(), 20u);
    EXPECT_EQ(*seen.begin(), 1);
    EXPECT_EQ(*seen.rbegin(), 20);
    EXPECT_THROW(decode_action_id(21), std::out_of_range);
    EXPECT_THROW(decode_action_id(-1), std::out_of_range);
}

TEST(Actions, ResolveSlots) {
    SlotTables t;
    t.of(ActionType::BlockTraffic).push_back({"src/45.1.1.1/32", 0.9, action::BlockSource{*Cidr::parse("45.1.1.1")}});
    t.of(ActionType::OpenPort).push_back({"rule/9", 0.0, action::OpenPort{9}});
    const auto noop = resolve_action(0, t);
    EXPECT_FALSE(noop.fallback);
    EXPECT_TRUE(std::holds_alternative<action::NoOp>(noop.action));
    const auto block = resolve_action(encode_action(ActionType::BlockTraffic, 0), t);
    EXPECT_EQ(block.action, ConcreteAction(action::BlockSource{*Cidr::parse("45.1.1.1")}));
    const auto empty = resolve_action(encode_action(ActionType::OpenPort, 2), t);
    EXPECT_TRUE(empty.fallback);
    EXPECT_TRUE(std::holds_alternative<action::NoOp>(empty.action));
}

// Formula oracle written independently of compute_reward.
double reward_oracle(const StepOutcome& o, const RewardConfig& c) {
    double r = 0.0;
    r += c.r1 * o.neutralized_by_agent;
    r -= c.r2 * o.breaches;
    r += c.r3 * o.violations_fixed;
    r -= c.r4 * o.violations_introduced;
    r -= c.resource_rate * o.monitoring_units;
    r -= c.change_cost * o.config_changes;
    if (o.stable) r += c.stability_bonus;
    r -= c.step_attack_penalty * o.active_attacks;
    r -= c.fp_disruption_penalty * o.false_positives;
    if (o.invalid_action) r -= c.invalid_action_penalty;
    return r;
}

TEST(Reward, NeutralizeOne) {
    StepOutcome o;
    o.neutralized_by_agent = 1;
    o.config_changes = 1;
    EXPECT_DOUBLE_EQ(compute_reward(o, {}).total(), 9.5);
    EXPECT_NEAR(compute_reward(o, {}).total(), reward_oracle(o, {}), 1e-12);
}

TEST(Reward, BreachWithActiveAttack) {
    StepOutcome o;
    o.breaches = 1;
    o.active_attacks = 1;
    EXPECT_DOUBLE_EQ(compute_reward(o, {}).total(), -100.2);
}

TEST(Reward, CleanNoOp) {
    StepOutcome o;
    o.stable = true;
    EXPECT_DOUBLE_EQ(compute_reward(o, {}).total(), 0.05);
}

RewardConfig random_config(Rng& rng) {
    RewardConfig c;
    c.r1 = rng.uniform(0.6, 50);
    c.r2 = rng.uniform(c.r1, 500);
    c.r3 = rng.uniform(0, 20);
    c.r4 = rng.uniform(c.r3, 80);
    c.step_attack_penalty = rng.uniform(0, 2);
    c.stability_bonus = rng.uniform(0, 1);
    c.resource_rate = rng.uniform(0, 0.1);
    c.change_cost = rng.uniform(0, std::min(c.r1, 5.0) * 0.99);
    c.fp_disruption_penalty = rng.uniform(0, 50);
    c.invalid_action_penalty = rng.uniform(0, 1);
    return c;
}

TEST(Reward, SignStructureOverValidConfigs) {
    Rng rng(77);
    for (int i = 0; i < 5000; ++i) {
        const auto c = random_config(rng);
        ASSERT_NO_THROW(c.validate());
        StepOutcome breach;
        breach.breaches = 1;
        EXPECT_LT(compute_reward(breach, c).total(), 0.0);
        StepOutcome win;
        win.neutralized_by_agent = 1;
        win.config_changes = 1;
        EXPECT_GT(compute_reward(win, c).total(), 0.0);
    }
}

TEST(Reward, MatchesOracleOnRandomOutcomes) {
    Rng rng(78);
    for (int i = 0; i < 5000; ++i) {
        const auto c = random_config(rng);
        StepOutcome o;
        o.neutralized_by_agent = static_cast<int>(rng.uniform_int(0, 2));
        o.breaches = static_cast<int>(rng.uniform_int(0, 2));
        o.violations_fixed = static_cast<int>(rng.uniform_int(0, 2));
        o.violations_introduced = static_cast<int>(rng.uniform_int(0, 2));
        o.monitoring_units = static_cast<int>(rng.uniform_int(0, 6));
        o.config_changes = static_cast<int>(rng.uniform_int(0, 1));
        o.stable = rng.uniform() < 0.5;
        o.active_attacks = static_cast<int>(rng.uniform_int(0, 3));
        o.false_positives = static_cast<int>(rng.uniform_int(0, 1));
        o.invalid_action = rng.uniform() < 0.5;
        const auto b = compute_reward(o, c);
        EXPECT_NEAR(b.total(), reward_oracle(o, c), 1e-9);
    }
}

TEST(Reward, InvariantsRejected) {
    RewardConfig c;
    c.r2 = 5;  // below r1
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.r4 = 1;  // below r3
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.stability_bonus = -1;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Features, EmptyWindowBaseline) {
    Fixture f;
    const auto s = features_of(f.window, f.config.state, f.view());
    for (int i : {feat::kAlertCount, feat::kMaxAnomaly, feat::kSigScan, feat::kSigFlood, feat::kSigWeb,
                  feat::kSigPrivesc, feat::kViolationCount, feat::kC1, feat::kC1 + 1, feat::kC1 + 2, feat::kC1 + 3,
                  feat::kActiveIncident, feat::kAnomalousPrincipals}) {
        EXPECT_EQ(s[static_cast<std::size_t>(i)], 0.0) << i;
    }
    EXPECT_DOUBLE_EQ(s[feat::kRuleCount], 6.0 / 32.0);
    EXPECT_DOUBLE_EQ(s[feat::kWorldOpenRules], 2.0 / 8.0);
    EXPECT_DOUBLE_EQ(s[feat::kMonitoringCoverage], 0.5);
    EXPECT_EQ(s[feat::kLastAction], 1.0);
}

TEST(Features, SqliFlag) {
    Fixture f;
    f.window.push(1, {flow("45.1.1.1", 0.8, Signature::Sqli)});
    const auto s = features_of(f.window, f.config.state, f.view());
    EXPECT_EQ(s[feat::kSigWeb], 1.0);
    EXPECT_EQ(s[feat::kSigScan], 0.0);
    EXPECT_DOUBLE_EQ(s[feat::kMaxAnomaly], 0.8);
}

TEST(Features, AlertCountSaturates) {
    Fixture f;
    std::vector<ObservedEvent> alerts;
    for (int i = 0; i < 40; ++i) alerts.push_back(alert("45.1.1." + std::to_string(i), 0.9));
    f.window.push(1, alerts);
    EXPECT_EQ(features_of(f.window, f.config.state, f.view())[feat::kAlertCount], 1.0);
    // Oracle min(count, 20) / 20 below the cap.
    Fixture g;
    g.window.push(1, std::vector<ObservedEvent>(alerts.begin(), alerts.begin() + 7));
    EXPECT_DOUBLE_EQ(features_of(g.window, g.config.state, g.view())[feat::kAlertCount], 7.0 / 20.0);
}

TEST(Features, DeniedSourceIsNotLive) {
    Fixture f;
    apply_action(f.config, action::BlockSource{*Cidr::parse("45.1.1.1")}, {});
    f.window.push(1, {flow("45.1.1.1", 0.9, Signature::Scan), alert("45.1.1.1", 0.9)});
    const auto s = features_of(f.window, f.config.state, f.view());
    EXPECT_EQ(s[feat::kSigScan], 0.0);
    EXPECT_EQ(s[feat::kAlertCount], 0.0);
}

// Flipping hidden truth leaves the observation unchanged.
TEST(Features, PoisonedTruthIsInvisible) {
    auto run = [](bool flip) {
        auto w = World::init(kTopo, 4);
        auto c = baseline_config(kTopo);
        Rng rng(6);
        for (auto& s : sample_scenarios(full_mix(), kTopo, 200, rng)) w.spawn_scenario(s);
        EventWindow win(12);
        std::vector<StateVector> states;
        for (int t = 0; t < 200; ++t) {
            auto out = w.step(c);
            std::vector<ObservedEvent> obs;
            for (auto e : out.events) {
                if (flip) e.truth_malicious = !e.truth_malicious;
                obs.push_back(observe(e));
            }
            win.push(w.current_step(), obs);
            states.push_back(features_of(win, c.state, view_of(w)));
        }
        return states;
    };
    EXPECT_EQ(run(false), run(true));
}

TEST(Candidates, EmptyWhenQuiet) {
    Fixture f;
    EXPECT_TRUE(rank_candidates(f.window, f.config.state, f.view()).empty());
}

TEST(Candidates, SourcesByAnomaly) {
    Fixture f;
    f.window.push(1, {flow("91.2.2.2", 0.4), flow("45.1.1.1", 0.9)});
    const auto t = rank_candidates(f.window, f.config.state, f.view());
    const auto& b = t.of(ActionType::BlockTraffic);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[0].label, "src/45.1.1.1/32");
    EXPECT_EQ(b[1].label, "src/91.2.2.2/32");
}

TEST(Candidates, DriftRuleFirst) {
    Fixture f;
    FirewallRule r{0, Direction::Ingress, Cidr::any(), PortRange::single(22), Verb::Allow, RuleOrigin::Drift};
    apply_action(f.config, action::InsertRule{r}, {}, 0, Actor::Drift);
    f.window.push(1, {flow("45.1.1.1", 0.9)});
    const auto tables = rank_candidates(f.window, f.config.state, f.view());
    const auto& b = tables.of(ActionType::BlockTraffic);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[0].label, "rule/" + std::to_string(f.config.state.rules.back().id));
    EXPECT_TRUE(std::holds_alternative<action::RevokeRule>(b[0].action));
    EXPECT_EQ(b[1].label, "src/45.1.1.1/32");
}

TEST(Candidates, SameSlash24Merges) {
    Fixture f;
    f.window.push(1, {flow("45.1.1.1", 0.8), flow("45.1.1.2", 0.85), flow("45.1.1.3", 0.7)});
    const auto tables = rank_candidates(f.window, f.config.state, f.view());
    const auto& b = tables.of(ActionType::BlockTraffic);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].label, "src/45.1.1.0/24");
    EXPECT_DOUBLE_EQ(b[0].score, 0.85);
}

TEST(Candidates, AtMostFourPerType) {
    Fixture f;
    std::vector<ObservedEvent> ev;
    for (int i = 0; i < 9; ++i) ev.push_back(flow(std::to_string(50 + i) + ".1.1.1", 0.5 + 0.01 * i));
    f.window.push(1, ev);
    const auto t = rank_candidates(f.window, f.config.state, f.view());
    for (const auto& slot : t.slots) EXPECT_LE(slot.size(), 4u);
    EXPECT_EQ(t.of(ActionType::BlockTraffic)[0].label, "src/58.1.1.1/32");
}

TEST(Env, ResetWithoutScenariosIsQuiet) {
    SecurityEnv env;
    const auto s = env.reset_with(3, {});
    for (int i = feat::kViolationCount; i <= feat::kC1 + 3; ++i) EXPECT_EQ(s[static_cast<std::size_t>(i)], 0.0);
    EXPECT_EQ(s[feat::kAlertCount], 0.0);
    for (double v : s) {
        EXPECT_TRUE(std::isfinite(v));
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Env, ResetDeterministic) {
    EnvConfig c;
    c.mix = full_mix();
    SecurityEnv a(c), b(c);
    EXPECT_EQ(a.reset(7), b.reset(7));
    EXPECT_EQ(a.world(), b.world());
}

TEST(Env, SingleAttackPhaseSchedulesOneAttack) {
    EnvConfig c;
    c.mix = single_attack_mix();
    SecurityEnv env(c);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        env.reset(seed);
        int attacks = 0;
        for (const auto& s : env.world().scenarios()) attacks += is_attack(s.script.kind);
        EXPECT_EQ(attacks, 1);
        EXPECT_EQ(env.world().scenarios().size(), 1u);
    }
}

TEST(Env, CleanNoOpEarnsStability) {
    SecurityEnv env;
    env.reset_with(1, {});
    const auto t = env.step(0);
    EXPECT_DOUBLE_EQ(t.r, 0.05);
    EXPECT_EQ(t.info.breakdown.stability, 0.05);
}

TEST(Env, BlockingAttackerEarnsR1) {
    SecurityEnv env;
    auto script = make_default_script(ScenarioKind::PortScan, "scan", 2, {{"45.33.12.7"}, "web-0"});
    env.reset_with(1, {script});
    env.step(0);
    env.step(0);  // first scan events now in the window
    const auto& slots = env.slot_tables().of(ActionType::BlockTraffic);
    ASSERT_FALSE(slots.empty());
    EXPECT_EQ(slots[0].label, "src/45.33.12.7/32");
    const auto t = env.step(encode_action(ActionType::BlockTraffic, 0));
    EXPECT_EQ(env.world().scenario_status("scan"), ScenarioStatus::Neutralized);
    EXPECT_EQ(t.info.breakdown.mitigation, 10.0);
    EXPECT_EQ(t.info.hit_attacks, std::vector<std::string>{"scan"});
    EXPECT_FALSE(t.info.false_positive);
}

TEST(Env, EmptySlotFallsBack) {
    SecurityEnv env;
    env.reset_with(1, {});
    const auto t = env.step(encode_action(ActionType::OpenPort, 2));
    EXPECT_TRUE(t.info.fallback);
    EXPECT_TRUE(std::holds_alternative<action::NoOp>(t.info.applied));
    EXPECT_EQ(t.info.breakdown.invalid, -0.1);
    EXPECT_EQ(env.security_config().version, 0);
}

TEST(Env, StepAfterDoneThrows) {
    EnvConfig c;
    c.episode_len = 3;
    SecurityEnv env(c);
    env.reset_with(1, {});
    env.step(0);
    env.step(0);
    EXPECT_TRUE(env.step(0).done);
    EXPECT_THROW(env.step(0), EnvError);
}

TEST(Env, BreakdownSumsExactlyAndEpisodesRepeat) {
    EnvConfig c;
    c.mix = full_mix();
    c.episode_len = 300;
    auto run = [&](std::uint64_t seed) {
        SecurityEnv env(c);
        env.reset(seed);
        Rng rng(seed + 99);
        std::vector<Transition> ts;
        while (!env.done()) {
            const auto a = static_cast<ActionId>(rng.uniform_int(0, kActionCount - 1));
            ts.push_back(env.step(rng.uniform() < 0.8 ? 0 : a));
            const auto& t = ts.back();
            EXPECT_EQ(t.r, t.info.breakdown.total());
            for (double v : t.s_next) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
        return ts;
    };
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto a = run(seed);
        const auto b = run(seed);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            ASSERT_EQ(a[i].s, b[i].s);
            ASSERT_EQ(a[i].r, b[i].r);
            ASSERT_EQ(a[i].info.breakdown, b[i].info.breakdown);
        }
    }
}

TEST(Env, RestrictingBenignAdminIsFalsePositive) {
    SecurityEnv env;
    ScenarioTargets t;
    t.principal = "admin-0";
    env.reset_with(1, {make_default_script(ScenarioKind::BenignAdminBurst, "burst", 1, t)});
    env.step(0);
    const auto& slots = env.slot_tables().of(ActionType::RestrictUser);
    ASSERT_FALSE(slots.empty());
    EXPECT_EQ(slots[0].label, "principal/admin-0");
    const auto tr = env.step(encode_action(ActionType::RestrictUser, 0));
    EXPECT_TRUE(tr.info.false_positive);
    EXPECT_EQ(tr.info.breakdown.false_positive, -15.0);
}

TEST(EpisodeLog, LineHasDocumentedFields) {
    SecurityEnv env;
    env.reset_with(1, {});
    const auto t = env.step(0);
    const auto j = nlohmann::json::parse(episode_log_line(1, t));
    for (const char* k : {"step", "state", "action", "reward", "breakdown", "incidents", "violations", "config_version"}) {
        EXPECT_TRUE(j.contains(k)) << k;
    }
    EXPECT_EQ(j["state"].size(), 32u);
    EXPECT_EQ(j["step"], 1);
    EXPECT_EQ(episode_log_line(1, t), episode_log_line(1, t));
}

}  // namespace
}  // namespace secpol
