#include "secpol/harness/evaluate.hpp"

#include <algorithm>
#include <map>

namespace secpol {

EpisodeStats run_episode(Agent& agent, SecurityEnv& env, std::uint64_t seed, EpisodeLogWriter* log) {
    EpisodeStats st;
    st.seed = seed;
    st.episode_len = env.config().episode_len;
    agent.begin_episode(seed);
    std::map<std::string, bool> targeted;
    double units = 0.0;
    while (!env.done()) {
        const auto choice = agent.act(env.state(), env.slot_tables(), env.step_count());
        const Transition t = std::holds_alternative<ActionId>(choice) ? env.step(std::get<ActionId>(choice))
                                                                      : env.step_concrete(std::get<ConcreteAction>(choice));
        ++st.steps;
        st.episode_return += t.r;
        if (t.info.changed) ++st.config_changes;
        if (t.info.false_positive) ++st.false_positive_actions;
        for (const auto& id : t.info.hit_attacks) targeted[id] = true;
        for (const auto& id : t.info.hit_benign) targeted[id] = true;
        units += env.security_config().state.monitoring_units();
        if (log) log->write(env.step_count(), t);
    }
    st.resource_cost = st.steps > 0 ? units / st.steps : 0.0;
    st.violations_at_end = static_cast<int>(default_violations(env.security_config().state).size());
    for (const auto& sc : env.world().scenarios()) {
        ScenarioStats s;
        s.id = sc.script.id;
        s.kind = sc.script.kind;
        s.baseline_blockable = sc.script.baseline_blockable;
        s.outcome = sc.status;
        s.first_event_step = sc.first_event_step;
        s.concluded_step = sc.concluded_step;
        s.targeted = targeted.count(sc.script.id) > 0;
        st.scenarios.push_back(std::move(s));
    }
    return st;
}

EvalResult evaluate(Agent& agent, const EnvConfig& env_config, const EvalSuite& suite) {
    if (suite.episodes < 1) throw std::invalid_argument("evaluation suite is empty");
    EnvConfig cfg = env_config;
    cfg.mix = suite.mix;
    SecurityEnv env(cfg);
    EvalResult out;
    for (int i = 0; i < suite.episodes; ++i) {
        const auto seed = derive_seed(suite.seed, static_cast<std::uint64_t>(i));
        env.reset(seed);
        out.episodes.push_back(run_episode(agent, env, seed));
    }
    out.report = compute_metrics(out.episodes);
    out.report.name = agent.name();
    return out;
}

}  // namespace secpol
