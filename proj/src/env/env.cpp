#include "secpol/env/env.hpp"

#include <algorithm>

namespace secpol {

namespace {

std::optional<ActionType> type_of(const ConcreteAction& a) {
    if (std::holds_alternative<action::BlockSource>(a) || std::holds_alternative<action::RevokeRule>(a)) {
        return ActionType::BlockTraffic;
    }
    if (std::holds_alternative<action::RestrictPrincipal>(a)) return ActionType::RestrictUser;
    if (std::holds_alternative<action::OpenPort>(a)) return ActionType::OpenPort;
    if (std::holds_alternative<action::IsolateInstance>(a)) return ActionType::IsolateInstance;
    if (std::holds_alternative<action::RaiseMonitoring>(a) || std::holds_alternative<action::EnableFlowLogging>(a)) {
        return ActionType::IncreaseMonitoring;
    }
    return std::nullopt;
}

bool network_attack(ScenarioKind k) {
    return k == ScenarioKind::PortScan || k == ScenarioKind::DDoS || k == ScenarioKind::WebExploit;
}

/// Scenarios (already started) whose entity a defensive action targets.
void classify_targets(const World& world, const ConcreteAction& a, StepInfo& info) {
    for (const auto& sc : world.scenarios()) {
        if (sc.status == ScenarioStatus::Pending) continue;
        const auto& sp = sc.script;
        bool hit = false;
        if (const auto* b = std::get_if<action::BlockSource>(&a)) {
            hit = std::any_of(sp.sources.begin(), sp.sources.end(), [&](const std::string& s) {
                auto addr = parse_ipv4(s);
                return addr && b->source.contains(*addr);
            });
        } else if (const auto* r = std::get_if<action::RestrictPrincipal>(&a)) {
            hit = !sp.principal.empty() && sp.principal == r->principal &&
                  (sp.kind == ScenarioKind::CredCompromise || sp.kind == ScenarioKind::BenignAdminBurst);
        } else if (const auto* i = std::get_if<action::IsolateInstance>(&a)) {
            hit = network_attack(sp.kind) && sp.target == i->instance;
        }
        if (!hit) continue;
        if (is_attack(sp.kind)) {
            info.hit_attacks.push_back(sp.id);
        } else if (sp.kind == ScenarioKind::BenignAdminBurst) {
            info.hit_benign.push_back(sp.id);
        }
    }
    info.false_positive = info.hit_attacks.empty();
}

}  // namespace

void EnvConfig::validate() const {
    if (episode_len < 1) throw std::invalid_argument("episode_len must be >= 1");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    topology.validate();
    mix.validate();
    rewards.validate();
}

SecurityEnv::SecurityEnv(EnvConfig config) : config_(std::move(config)), window_(config_.window) {
    config_.validate();
}

void SecurityEnv::set_rewards(const RewardConfig& rc) {
    rc.validate();
    config_.rewards = rc;
}

void SecurityEnv::set_episode_len(int n) {
    if (n < 1) throw std::invalid_argument("episode_len must be >= 1");
    if (!done_) throw EnvError("episode length can only change between episodes");
    config_.episode_len = n;
}

StateVector SecurityEnv::reset(std::uint64_t seed) {
    Rng rng(derive_seed(seed, 1));
    auto scripts = sample_scenarios(config_.mix, config_.topology, config_.episode_len, rng);
    return reset_with(seed, std::move(scripts));
}

StateVector SecurityEnv::reset_with(std::uint64_t seed, std::vector<ScenarioScript> scripts,
                                    std::vector<SecurityEvent> trace) {
    world_ = World::init(config_.topology, derive_seed(seed, 0));
    sec_ = baseline_config(config_.topology);
    for (auto& s : scripts) world_.spawn_scenario(std::move(s));
    world_.inject_trace(std::move(trace));
    window_ = EventWindow(config_.window);
    ctx_ = FeatureContext{0, config_.episode_len, std::nullopt, 0};
    done_ = false;
    observe_world();
    return state_;
}

void SecurityEnv::observe_world() {
    const auto view = view_of(world_);
    tables_ = rank_candidates(window_, sec_.state, view);
    state_ = extract_features(window_, sec_.state, view, tables_, ctx_);
}

Transition SecurityEnv::step(ActionId a) {
    if (done_) throw EnvError("step called on a finished episode");
    const auto r = resolve_action(a, tables_);
    return advance(r.action, r.fallback, a);
}

Transition SecurityEnv::step_concrete(const ConcreteAction& a) {
    if (done_) throw EnvError("step called on a finished episode");
    return advance(a, false, -1);
}

Transition SecurityEnv::advance(const ConcreteAction& a, bool fallback, ActionId id) {
    Transition t;
    t.s = state_;
    t.a = id;
    auto& info = t.info;
    const int next_step = world_.current_step() + 1;

    std::vector<ScenarioStatus> before;
    for (const auto& sc : world_.scenarios()) before.push_back(sc.status);

    ConcreteAction applied = action::NoOp{};
    if (!fallback && !std::holds_alternative<action::NoOp>(a)) {
        const auto pre = default_violations(sec_.state);
        try {
            auto res = apply_action(sec_, a, config_.guardrails, next_step, Actor::Agent);
            if (res.violation) {
                fallback = true;
                info.guardrail = res.violation->id;
            } else if (res.change) {
                applied = a;
                info.changed = true;
            }
        } catch (const PolicyError&) {
            fallback = true;
        }
        if (info.changed) {
            const auto post = default_violations(sec_.state);
            for (auto c : pre) info.violations_fixed += post.count(c) ? 0 : 1;
            for (auto c : post) info.violations_introduced += pre.count(c) ? 0 : 1;
            if (is_defensive(applied)) classify_targets(world_, applied, info);
        }
    }
    info.applied = applied;
    info.fallback = fallback;

    auto out = world_.step(sec_);
    std::vector<ObservedEvent> observed;
    observed.reserve(out.events.size());
    for (const auto& e : out.events) observed.push_back(observe(e));
    window_.push(world_.current_step(), std::move(observed));

    ctx_.step = world_.current_step();
    ctx_.last_action = info.changed ? type_of(applied) : std::nullopt;
    if (!sec_.change_log.empty()) ctx_.last_change_step = sec_.change_log.back().step;
    observe_world();

    StepOutcome o;
    const auto& scs = world_.scenarios();
    for (std::size_t i = 0; i < scs.size(); ++i) {
        if (!is_attack(scs[i].script.kind)) continue;
        if (i < before.size() && before[i] == ScenarioStatus::Active && scs[i].status == ScenarioStatus::Neutralized) {
            ++o.neutralized_by_agent;
        }
        if (scs[i].status == ScenarioStatus::Active) ++o.active_attacks;
    }
    for (const auto& inc : out.incidents) {
        if (inc.outcome == ScenarioStatus::Breached) ++o.breaches;
    }
    info.violations = evaluate_compliance(sec_, world_, default_compliance_rules());
    o.violations_fixed = info.violations_fixed;
    o.violations_introduced = info.violations_introduced;
    o.monitoring_units = sec_.state.monitoring_units();
    o.config_changes = info.changed ? 1 : 0;
    o.stable = o.active_attacks == 0 && info.violations.empty() && !info.changed && o.breaches == 0;
    o.false_positives = info.false_positive ? 1 : 0;
    o.invalid_action = fallback;

    info.breakdown = compute_reward(o, config_.rewards);
    info.incidents = std::move(out.incidents);
    info.config_version = sec_.version;
    t.r = info.breakdown.total();
    t.s_next = state_;
    done_ = world_.current_step() >= config_.episode_len;
    t.done = done_;
    return t;
}

}  // namespace secpol
