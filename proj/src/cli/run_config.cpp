#include "secpol/cli/run_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace secpol {

namespace {

struct Field {
    std::string section;
    std::string key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad(const std::string& where, const std::string& v) {
    throw ConfigError(where + ": invalid value '" + v + "'");
}

template <typename T>
T parse_integer(const std::string& where, const std::string& s) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) bad(where, s);
    return v;
}

double parse_real(const std::string& where, const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) bad(where, s);
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad(where, s);
    }
}

bool parse_flag(const std::string& where, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad(where, s);
}

std::vector<int> parse_sizes(const std::string& where, const std::string& s) {
    std::vector<int> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_integer<int>(where, item));
    if (out.empty()) bad(where, s);
    return out;
}

std::string real_str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sizes_str(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

template <typename T>
Field integer(std::string sec, std::string key, T RunConfig::*m) {
    const std::string where = sec + "." + key;
    return {sec, key, [=](RunConfig& c, const std::string& v) { c.*m = parse_integer<T>(where, v); },
            [=](const RunConfig& c) { return std::to_string(c.*m); }};
}

template <typename Get>
Field real(std::string sec, std::string key, Get g) {
    const std::string where = sec + "." + key;
    return {sec, key, [=](RunConfig& c, const std::string& v) { g(c) = parse_real(where, v); },
            [=](const RunConfig& c) { return real_str(g(const_cast<RunConfig&>(c))); }};
}

template <typename T, typename Get>
Field whole(std::string sec, std::string key, Get g) {
    const std::string where = sec + "." + key;
    return {sec, key, [=](RunConfig& c, const std::string& v) { g(c) = parse_integer<T>(where, v); },
            [=](const RunConfig& c) { return std::to_string(g(const_cast<RunConfig&>(c))); }};
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = [] {
        std::vector<Field> v;
        // topology
        v.push_back(integer("topology", "web", &RunConfig::web));
        v.push_back(integer("topology", "db", &RunConfig::db));
        v.push_back({"topology", "db_zone",
                     [](RunConfig& c, const std::string& s) {
                         auto z = parse_zone(s);
                         if (!z) bad("topology.db_zone", s);
                         c.db_zone = *z;
                     },
                     [](const RunConfig& c) { return std::string(to_string(c.db_zone)); }});
        v.push_back(integer("topology", "admins", &RunConfig::admins));
        v.push_back(integer("topology", "power_users", &RunConfig::power_users));
        v.push_back(integer("topology", "service_accounts", &RunConfig::service_accounts));
        v.push_back(integer("topology", "read_only", &RunConfig::read_only));
        // scenarios
        for (int i = 0; i < kScenarioKindCount; ++i) {
            const auto kind = static_cast<ScenarioKind>(i);
            v.push_back(real("scenarios", "weight_" + lower(to_string(kind)),
                             [i](RunConfig& c) -> double& { return c.scenarios.weights[static_cast<std::size_t>(i)]; }));
        }
        v.push_back({"scenarios", "always",
                     [](RunConfig& c, const std::string& s) {
                         c.scenarios.always.clear();
                         std::stringstream in(s);
                         std::string item;
                         while (std::getline(in, item, ',')) {
                             if (item.empty()) continue;
                             auto k = parse_scenario_kind(item);
                             if (!k) bad("scenarios.always", item);
                             c.scenarios.always.push_back(*k);
                         }
                     },
                     [](const RunConfig& c) {
                         std::string s;
                         for (std::size_t i = 0; i < c.scenarios.always.size(); ++i) {
                             s += (i ? "," : "") + std::string(to_string(c.scenarios.always[i]));
                         }
                         return s;
                     }});
        v.push_back(whole<int>("scenarios", "min_count", [](RunConfig& c) -> int& { return c.scenarios.min_count; }));
        v.push_back(whole<int>("scenarios", "max_count", [](RunConfig& c) -> int& { return c.scenarios.max_count; }));
        v.push_back(real("scenarios", "baseline_blockable_fraction",
                         [](RunConfig& c) -> double& { return c.scenarios.baseline_blockable_fraction; }));
        v.push_back(whole<int>("scenarios", "onset_min", [](RunConfig& c) -> int& { return c.scenarios.onset_min; }));
        v.push_back(whole<int>("scenarios", "onset_tail", [](RunConfig& c) -> int& { return c.scenarios.onset_tail; }));
        v.push_back(whole<int>("scenarios", "onset_jitter", [](RunConfig& c) -> int& { return c.scenarios.onset_jitter; }));
        // rewards
        v.push_back(real("rewards", "r1", [](RunConfig& c) -> double& { return c.rewards.r1; }));
        v.push_back(real("rewards", "r2", [](RunConfig& c) -> double& { return c.rewards.r2; }));
        v.push_back(real("rewards", "r3", [](RunConfig& c) -> double& { return c.rewards.r3; }));
        v.push_back(real("rewards", "r4", [](RunConfig& c) -> double& { return c.rewards.r4; }));
        v.push_back(real("rewards", "step_attack_penalty", [](RunConfig& c) -> double& { return c.rewards.step_attack_penalty; }));
        v.push_back(real("rewards", "stability_bonus", [](RunConfig& c) -> double& { return c.rewards.stability_bonus; }));
        v.push_back(real("rewards", "resource_rate", [](RunConfig& c) -> double& { return c.rewards.resource_rate; }));
        v.push_back(real("rewards", "change_cost", [](RunConfig& c) -> double& { return c.rewards.change_cost; }));
        v.push_back(real("rewards", "fp_disruption_penalty", [](RunConfig& c) -> double& { return c.rewards.fp_disruption_penalty; }));
        v.push_back(real("rewards", "invalid_action_penalty", [](RunConfig& c) -> double& { return c.rewards.invalid_action_penalty; }));
        // env
        v.push_back(integer("env", "episode_len", &RunConfig::episode_len));
        v.push_back(integer("env", "window", &RunConfig::window));
        v.push_back({"env", "guardrails",
                     [](RunConfig& c, const std::string& s) { c.guardrails = parse_flag("env.guardrails", s); },
                     [](const RunConfig& c) { return std::string(c.guardrails ? "true" : "false"); }});
        // dqn
        v.push_back({"dqn", "hidden",
                     [](RunConfig& c, const std::string& s) { c.dqn.hidden = parse_sizes("dqn.hidden", s); },
                     [](const RunConfig& c) { return sizes_str(c.dqn.hidden); }});
        v.push_back(real("dqn", "lr", [](RunConfig& c) -> double& { return c.dqn.lr; }));
        v.push_back(whole<int>("dqn", "batch", [](RunConfig& c) -> int& { return c.dqn.batch; }));
        v.push_back(real("dqn", "eps_start", [](RunConfig& c) -> double& { return c.dqn.eps_start; }));
        v.push_back(real("dqn", "eps_end", [](RunConfig& c) -> double& { return c.dqn.eps_end; }));
        v.push_back(whole<long>("dqn", "decay_steps", [](RunConfig& c) -> long& { return c.dqn.decay_steps; }));
        v.push_back(whole<long>("dqn", "target_sync", [](RunConfig& c) -> long& { return c.dqn.target_sync; }));
        v.push_back(real("dqn", "gamma", [](RunConfig& c) -> double& { return c.dqn.gamma; }));
        v.push_back(whole<std::size_t>("dqn", "buffer", [](RunConfig& c) -> std::size_t& { return c.dqn.buffer; }));
        v.push_back(whole<int>("dqn", "train_every", [](RunConfig& c) -> int& { return c.dqn.train_every; }));
        v.push_back(whole<long>("dqn", "learning_starts", [](RunConfig& c) -> long& { return c.dqn.learning_starts; }));
        v.push_back(whole<long>("dqn", "epsilon_reset_every", [](RunConfig& c) -> long& { return c.dqn.epsilon_reset_every; }));
        // ppo
        v.push_back({"ppo", "hidden",
                     [](RunConfig& c, const std::string& s) { c.ppo.hidden = parse_sizes("ppo.hidden", s); },
                     [](const RunConfig& c) { return sizes_str(c.ppo.hidden); }});
        v.push_back(real("ppo", "clip", [](RunConfig& c) -> double& { return c.ppo.clip; }));
        v.push_back(real("ppo", "lambda", [](RunConfig& c) -> double& { return c.ppo.lambda; }));
        v.push_back(real("ppo", "gamma", [](RunConfig& c) -> double& { return c.ppo.gamma; }));
        v.push_back(whole<int>("ppo", "horizon", [](RunConfig& c) -> int& { return c.ppo.horizon; }));
        v.push_back(whole<int>("ppo", "minibatch", [](RunConfig& c) -> int& { return c.ppo.minibatch; }));
        v.push_back(whole<int>("ppo", "epochs", [](RunConfig& c) -> int& { return c.ppo.epochs; }));
        v.push_back(real("ppo", "lr", [](RunConfig& c) -> double& { return c.ppo.lr; }));
        v.push_back(real("ppo", "value_coef", [](RunConfig& c) -> double& { return c.ppo.value_coef; }));
        v.push_back(real("ppo", "entropy_coef", [](RunConfig& c) -> double& { return c.ppo.entropy_coef; }));
        v.push_back(real("ppo", "logit_noise", [](RunConfig& c) -> double& { return c.ppo.logit_noise; }));
        // curriculum
        v.push_back(real("curriculum", "train_blockable_fraction", [](RunConfig& c) -> double& { return c.train_blockable_fraction; }));
        v.push_back(integer("curriculum", "single_episodes", &RunConfig::single_episodes));
        v.push_back(integer("curriculum", "multi_episodes", &RunConfig::multi_episodes));
        v.push_back(real("curriculum", "single_r1", [](RunConfig& c) -> double& { return c.single_r1; }));
        v.push_back(integer("curriculum", "train_episode_len", &RunConfig::train_episode_len));
        v.push_back(integer("curriculum", "train_onset_tail", &RunConfig::train_onset_tail));
        v.push_back(integer("curriculum", "steps", &RunConfig::steps));
        v.push_back(integer("curriculum", "workers", &RunConfig::workers));
        // eval
        v.push_back(integer("eval", "episodes", &RunConfig::eval_episodes));
        v.push_back(integer("eval", "seed", &RunConfig::eval_seed));
        // output
        v.push_back({"output", "run_root", [](RunConfig& c, const std::string& s) { c.run_root = s; },
                     [](const RunConfig& c) { return c.run_root; }});
        return v;
    }();
    return f;
}

}  // namespace

TopologyConfig RunConfig::topology() const {
    return TopologyConfig::build(web, db, db_zone, admins, power_users, service_accounts, read_only);
}

EnvConfig RunConfig::env_config() const {
    EnvConfig e;
    e.episode_len = episode_len;
    e.window = window;
    e.topology = topology();
    e.mix = scenarios;
    e.rewards = rewards;
    e.guardrails.enabled = guardrails;
    return e;
}

Curriculum RunConfig::curriculum() const {
    auto c = Curriculum::defaults(train_blockable_fraction, train_episode_len, train_onset_tail);
    c.phases[0].episodes = single_episodes;
    c.phases[1].episodes = multi_episodes;
    RewardConfig boosted = rewards;
    boosted.r1 = single_r1;
    c.phases[0].rewards = boosted;
    c.phases[1].rewards = rewards;
    c.phases[2].rewards = rewards;
    return c;
}

EvalSuite RunConfig::eval_suite() const {
    EvalSuite s;
    s.mix = scenarios;
    s.episodes = eval_episodes;
    s.seed = eval_seed;
    return s;
}

void RunConfig::validate() const {
    try {
        if (web < 0 || db < 0 || admins < 0 || power_users < 0 || service_accounts < 0 || read_only < 0) {
            throw ConfigError("topology counts must be >= 0");
        }
        env_config().validate();
        dqn.validate();
        ppo.validate();
        curriculum().validate();
        if (train_episode_len < 0) throw ConfigError("curriculum.train_episode_len must be >= 0");
        if (train_onset_tail < 0) throw ConfigError("curriculum.train_onset_tail must be >= 0");
        if (steps < 0) throw ConfigError("curriculum.steps must be >= 0");
        if (workers < 1) throw ConfigError("curriculum.workers must be >= 1");
        if (eval_episodes < 1) throw ConfigError("eval.episodes must be >= 1");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_run_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
    }
    std::map<std::pair<std::string, std::string>, const Field*> index;
    std::set<std::string> sections;
    for (const auto& f : fields()) {
        index[{f.section, f.key}] = &f;
        sections.insert(f.section);
    }
    RunConfig c;
    for (const auto& [section, body] : tree) {
        if (!sections.count(section)) {
            if (body.empty()) throw ConfigError("key '" + section + "' outside any section");
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            auto it = index.find({section, key});
            if (it == index.end()) throw ConfigError("unknown key '" + section + "." + key + "'");
            it->second->set(c, value.get_value<std::string>());
        }
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    try {
        return parse_run_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string to_ini(const RunConfig& c) {
    std::ostringstream out;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            if (!section.empty()) out << '\n';
            section = f.section;
            out << '[' << section << "]\n";
        }
        out << f.key << " = " << f.get(c) << '\n';
    }
    return out.str();
}

}  // namespace secpol
