#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>

#include "secpol/env/env.hpp"
#include "secpol/harness/curriculum.hpp"
#include "secpol/harness/evaluate.hpp"
#include "secpol/rl/dqn.hpp"
#include "secpol/rl/ppo.hpp"

namespace secpol {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a run needs, from an INI file with sections topology,
/// scenarios, rewards, env, dqn, ppo, curriculum, eval and output. Every key
/// is optional; unknown sections or keys are rejected.
struct RunConfig {
    int web = 2, db = 1, admins = 2, power_users = 0, service_accounts = 1, read_only = 0;
    Zone db_zone = Zone::Private;

    ScenarioMix scenarios = full_mix();  // evaluation mix
    RewardConfig rewards;
    int episode_len = 720;
    int window = 12;
    bool guardrails = true;
    DqnConfig dqn;
    PpoConfig ppo;

    double train_blockable_fraction = 0.2;
    int single_episodes = 60;
    int multi_episodes = 100;
    double single_r1 = 20.0;
    int train_episode_len = 240;  // 0 = env.episode_len
    int train_onset_tail = 30;
    long steps = 200000;
    int workers = 1;

    int eval_episodes = 200;
    std::uint64_t eval_seed = 424242;

    std::string run_root = "runs";

    TopologyConfig topology() const;
    EnvConfig env_config() const;
    Curriculum curriculum() const;
    EvalSuite eval_suite() const;
    void validate() const;  // throws ConfigError
};

/// Throws ConfigError with the line number or the offending key.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

/// Fully resolved INI text; parsing it back yields an identical configuration.
std::string to_ini(const RunConfig& c);

}  // namespace secpol
